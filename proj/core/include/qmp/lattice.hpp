#pragma once

// Periodic position lattice for the single-degree-of-freedom apparatus.
//
// Conventions (h = 2*pi, i.e. hbar = 1):
//   * n points, length L, spacing dq = L/n; positions q_j = (j - n/2) dq;
//   * momentum grid p_k = (k - n/2) dp with dp = 2*pi/L, so dq dp n = 2*pi;
//   * the unitary DFT F has entries F_{kj} = exp(-i p_k q_j)/sqrt(n) and maps
//     position l2-coordinates to momentum l2-coordinates;
//   * wavefunction amplitudes carry units dq^{-1/2}: sum_j |alpha_j|^2 dq = 1;
//     the l2 coordinate vector is c = sqrt(dq) * alpha.
//
// exp(-i a P) with a = m dq acts on position coordinates as the cyclic shift
// c_j -> c_{(j-m) mod n}; this is what makes the coupling a conditional shift.

#include <vector>

#include "qmp/linalg.hpp"

namespace qmp {

class Lattice {
  public:
    // n_points must be a power of two >= 16; length > 0.
    static Lattice make(int n_points, double length);

    int n() const { return n_; }
    double length() const { return length_; }
    double dq() const { return dq_; }
    double dp() const { return dp_; }

    double position(int j) const { return positions_(j); }
    double momentum(int k) const { return momenta_(k); }
    const RealVector &positions() const { return positions_; }
    const RealVector &momenta() const { return momenta_; }

    int wrap_site(long j) const {
        const long n = n_;
        return static_cast<int>(((j % n) + n) % n);
    }

    // Reduce a coordinate modulo L into [-L/2, L/2).
    double wrap_coordinate(double x) const;

    // Unitary DFT on l2 coordinates (momentum components in grid order).
    Vector dft(const Vector &coords) const;
    Vector idft(const Vector &coords) const;

  private:
    int n_ = 0;
    double length_ = 0.0, dq_ = 0.0, dp_ = 0.0;
    RealVector positions_, momenta_;
    std::vector<Complex> roots_;  // exp(-2*pi*i*r/n)
};

/// Lattice wavefunction; amplitudes in units dq^{-1/2}.
struct WaveFunction {
    Lattice lattice;
    Vector amplitudes;

    double norm_squared() const;  // sum |alpha|^2 dq

    Vector coords() const;           // sqrt(dq) * amplitudes
    Vector momentum_coords() const;  // F * coords

    RealVector position_density() const;  // |alpha_j|^2, integrates against dq
    RealVector momentum_density() const;  // integrates against dp

    double position_mean() const;
    double position_std() const;
    double momentum_mean() const;
    double momentum_std() const;
};

// Normalized packet exp(-(q-q0)^2/(4 s^2)) exp(i p0 q). Guards: 3s < L/4 and
// |q0| + 3s < L/2, else SupportViolation.
WaveFunction gaussian_packet(const Lattice &lat, double q0, double p0, double s);

// Q = diag(q_j) with its trivial eigensystem.
HermitianObservable position_observable(const Lattice &lat);

// P = F^dagger diag(p_k) F, built from its exact plane-wave eigensystem.
HermitianObservable momentum_observable(const Lattice &lat);

}  // namespace qmp
