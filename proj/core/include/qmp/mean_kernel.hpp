#pragma once

// Conditional expectation onto the commutant of a discrete observable,
// realized as a Schur multiplier in its eigenbasis: the mean acts on the
// characters u -> e^{i u Delta} only through the spectral gap Delta, so it is
// fully described by a kernel kappa(Delta) with kappa(0) = 1:
//
//   exact_pinching      kappa = 1{Delta = 0}
//   cesaro(T)           kappa = sin(T Delta)/(T Delta)      (uniform u-weight on [-T,T])
//   gaussian_weight(tau) kappa = exp(-tau^2 Delta^2 / 2)    (Gaussian u-weight, std tau)
//   lattice_uniform(n,L) kappa = (1/n) Re sum_k e^{i p_k Delta}  (uniform on the momentum grid)
//
// cesaro and gaussian_weight are Fourier transforms of probability densities,
// so the induced Schur multipliers are completely positive. Gaps at or below
// gap_tol are treated as Delta = 0 (same spectral value).

#include <functional>
#include <string>

#include "qmp/linalg.hpp"

namespace qmp {

class MeanKernel {
  public:
    enum class Family { kExactPinching, kCesaro, kGaussian, kLatticeUniform };

    static MeanKernel pinching();
    static MeanKernel cesaro(double window);
    static MeanKernel gaussian(double tau);
    static MeanKernel lattice_uniform(int n_points, double length);

    // "pinching" | "cesaro:T=<v>" | "gauss:tau=<v>" | "lattice:n=<int>,L=<v>"
    static MeanKernel parse(const std::string &spec);

    double operator()(double gap) const;

    Family family() const { return family_; }
    std::string spec() const;

  private:
    Family family_ = Family::kExactPinching;
    double param_ = 0.0;   // T or tau
    int n_points_ = 0;     // lattice_uniform
    double length_ = 0.0;  // lattice_uniform
};

// E^X[A] as a Schur multiplier in x's eigenbasis: entry (j,k) of A is scaled
// by kappa(x_j - x_k); degenerate blocks (gap <= gap_tol) are untouched.
Matrix conditional_expectation(const HermitianObservable &x, const Matrix &a,
                               const MeanKernel &kernel, double gap_tol = kDefaultGapTol);

// Block diagonalization sum_i P_i a P_i (the exact-pinching channel).
Matrix pinch(const HermitianObservable &x, const Matrix &a);

/// Finite weighted-average surrogate for the invariant mean: a u-grid with a
/// nonnegative density that sums to one against du.
struct UGrid {
    RealVector points;
    RealVector weights;
    double du = 0.0;

    // Midpoint grid on [-half_width, half_width] with uniform weights.
    static UGrid uniform_window(double half_width, double du);

    // Midpoint grid covering n_sigma standard deviations of a centered
    // Gaussian density of std tau, renormalized on the grid.
    static UGrid gaussian(double tau, double du, double n_sigma = 8.0);

    void validate() const;  // BadWeight on negative or unnormalized weights
};

Complex scalar_mean(const std::function<Complex(double)> &f, const UGrid &grid);

}  // namespace qmp
