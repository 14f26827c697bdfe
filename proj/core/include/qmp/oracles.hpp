#pragma once

// Brute-force references, implementation-independent of the modules they
// check (shared code is limited to the linear-algebra layer): the projective
// two-step collapse table, the direct u-grid average of the twirl, and the
// spectrally exponentiated coupling.

#include <cstdint>
#include <string>

#include "qmp/linalg.hpp"
#include "qmp/mean_kernel.hpp"
#include "qmp/process.hpp"

namespace qmp {

struct OracleReport {
    std::string name;
    double max_abs_error = 0.0;
    int instances_tested = 0;
    std::string worst_instance;
};

/// Projective successive-measurement table p(x_i, y_j) = Tr[Y(y_j) P_i rho P_i].
struct LuedersTable {
    RealVector x_values;
    RealVector y_values;
    RealMatrix p;

    // sum over x_i in B of the y-mean, i.e. sum_{i in B, j} y_j p(i, j).
    double restricted_y_mean(const std::function<bool(double)> &in_b) const;
};

LuedersTable lueders_successive_oracle(const HermitianObservable &x,
                                       const HermitianObservable &y, const DensityState &rho);

// sum_i weight(u_i) du e^{i u_i X} A e^{-i u_i X}; requires du * max_gap <= 0.1.
Matrix ugrid_mean_oracle(const HermitianObservable &x, const Matrix &a, const UGrid &grid);

// Compares exp(-i (X (x) P)) built by spectral decomposition of X (x) P with
// the conditional-shift construction; requires dim * n_points <= 512.
double dense_unitary_oracle(const MeasurementProcess &proc);

// Report-producing sweeps over seeded instances.
OracleReport run_lueders_oracle(std::uint64_t seed);
OracleReport run_ugrid_oracle(std::uint64_t seed);
OracleReport run_dense_unitary_oracle(std::uint64_t seed);

}  // namespace qmp
