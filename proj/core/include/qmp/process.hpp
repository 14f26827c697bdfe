#pragma once

// The canonical measuring process: coupling U = exp(-i lambda X (x) P) acting
// as a conditional cyclic shift (t lambda = 1 always), pointer statistics,
// successive-measurement joint distributions and the collapse-postulate gap.
//
// X eigenvalues must be integer multiples of dq so the conditional shift is an
// exact lattice permutation; the coupling then satisfies the pointer identity
// in cyclic form exactly. Composite vectors and operators use l2 coordinates
// with the system index slow and the apparatus index fast.

#include <functional>
#include <vector>

#include "qmp/lattice.hpp"
#include "qmp/linalg.hpp"
#include "qmp/mean_kernel.hpp"
#include "qmp/preparation.hpp"

namespace qmp {

/// Half-open pointer bins [e_b, e_{b+1}) partitioning the lattice range.
struct Bins {
    RealVector edges;  // ascending, size >= 2

    static Bins uniform(const Lattice &lat, int count);
    static Bins from_edges(RealVector edges);

    int count() const { return static_cast<int>(edges.size()) - 1; }
    double lo(int b) const { return edges(b); }
    double hi(int b) const { return edges(b + 1); }

    // Index of the bin containing x, or -1.
    int locate(double x) const;
};

class MeasurementProcess {
  public:
    // Validates commensurability (x_i = m_i dq within 1e-9), the analytic wrap
    // guard max|m_i| dq + 3 s < L/2 and the numeric guard that every shifted
    // packet keeps all but 1e-10 of its mass inside the central half-window
    // [-L/4, L/4).
    static MeasurementProcess make(const HermitianObservable &x, const Lattice &lat,
                                   const ApparatusPreparation &preparation);

    const HermitianObservable &system_observable() const { return x_; }
    const Lattice &lattice() const { return lattice_; }
    const ApparatusPreparation &preparation() const { return preparation_; }
    double coupling() const { return 1.0; }  // t lambda = 1 by construction

    int system_dim() const { return x_.dim(); }
    int shift_sites(int group) const { return shifts_[group]; }

    // Unit-norm preparation coordinates shifted by m_g sites (group g row).
    const Matrix &shifted_coords() const { return shifted_coords_; }

  private:
    HermitianObservable x_;
    Lattice lattice_;
    ApparatusPreparation preparation_;
    std::vector<int> shifts_;
    Matrix shifted_coords_;  // groups x n
};

// U (psi (x) alpha): each eigencomponent's apparatus amplitudes cyclically
// shifted by m_i sites. psi must be normalized.
Vector evolve_pure(const MeasurementProcess &proc, const Vector &psi);

// Explicit sum_i P_i (x) Shift(m_i); requires dim * n_points <= 4096.
Matrix coupling_unitary(const MeasurementProcess &proc);

// || U* (1 (x) f(Q)) U - f_cyc(X (x) 1 + 1 (x) Q) || with the argument of f
// reduced modulo L into [-L/2, L/2); <= 1e-10 under the cyclic convention.
double heisenberg_pointer_check(const MeasurementProcess &proc,
                                const std::function<double(double)> &f);

// Pr{Q in bin} on the evolved state U(rho (x) sigma)U*.
RealVector pointer_distribution(const MeasurementProcess &proc, const DensityState &rho,
                                const Bins &bins);

struct SuccessiveJointDistribution {
    Bins pointer_bins;
    RealVector y_values;
    RealMatrix table;  // bins x y-values

    RealVector pointer_marginal() const;
    RealVector y_marginal() const;
};

// p(b, y_j) = Tr[(Y(y_j) (x) Q(b)) U(rho (x) sigma) U*].
SuccessiveJointDistribution successive_joint(const MeasurementProcess &proc,
                                             const DensityState &rho,
                                             const HermitianObservable &y, const Bins &bins);

// System operator M with <psi|M|psi'> = <psi (x) alpha|T|psi' (x) alpha>.
Matrix apparatus_contraction(const MeasurementProcess &proc, const Matrix &t);

// | sum_{b in B} int y p(b, dy) - Tr[X(B) E^X_kappa[Y] rho] | for B the union
// of the selected bins. Every eigenvalue must lie in the interior of its bin
// (at least dq/2 from every edge), else BinMisaligned.
double srinivas_gap(const MeasurementProcess &proc, const DensityState &rho,
                    const HermitianObservable &y, const Bins &bins,
                    const std::vector<int> &selected_bins,
                    const MeanKernel &kernel = MeanKernel::pinching());

// Normalized a-posteriori state given the pointer landed in bin b.
DensityState posterior_state(const MeasurementProcess &proc, const DensityState &rho,
                             const Bins &bins, int bin_index);

}  // namespace qmp
