#pragma once

// Dense complex linear algebra layer: spectral decompositions with gap-tolerant
// eigenvalue grouping, Kronecker products, partial traces and the trace pairing.
// Conventions fixed project-wide:
//   * composite indices are (system, apparatus) with the system index slow
//     (outer) and the apparatus index fast (inner);
//   * all tolerances are absolute (every operator in scope has norm O(1));
//   * eigenvector phases are fixed by making the largest-magnitude component
//     of each column real and positive, so decompositions are reproducible.

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "qmp/errors.hpp"

namespace qmp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

// Absolute gap below which two eigenvalues belong to the same spectral group.
inline constexpr double kDefaultGapTol = 1e-9;

bool all_finite(const Matrix &m);
bool is_hermitian(const Matrix &m, double tol);
double max_abs(const Matrix &m);

// Largest singular value.
double operator_norm(const Matrix &m);

// (1/2)||a - b||_1 for Hermitian a, b.
double trace_distance(const Matrix &a, const Matrix &b);

// Kronecker product of square matrices, system factor first (slow index).
Matrix tensor_product(const Matrix &a, const Matrix &b);

// Trace over the apparatus (fast) index of an operator on H (x) K.
Matrix partial_trace_apparatus(const Matrix &t, int sys_dim, int app_dim);

/// A Hermitian matrix together with its spectral resolution. Eigenvalues whose
/// pairwise distance is within gap_tol are merged into one degenerate group
/// holding a single rank-k projector; group values are strictly increasing.
class HermitianObservable {
  public:
    HermitianObservable() = default;

    // Spectral decomposition of a Hermitian matrix (asymmetry above 1e-10
    // throws NotHermitian).
    static HermitianObservable decompose(const Matrix &m, double gap_tol = kDefaultGapTol);

    // Builds the observable from known orthonormal eigenvectors (columns) and
    // their eigenvalues; columns are re-sorted ascending.
    static HermitianObservable from_eigensystem(const Matrix &eigenvectors,
                                                const RealVector &values,
                                                double gap_tol = kDefaultGapTol);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    int groups() const { return static_cast<int>(group_values_.size()); }

    const Matrix &matrix() const { return matrix_; }

    // One value per distinct group, ascending.
    const RealVector &eigenvalues() const { return group_values_; }

    // Orthonormal eigenvector columns, sorted by eigenvalue.
    const Matrix &eigenvectors() const { return vectors_; }

    // Group index of each eigenvector column; groups are contiguous column ranges.
    const std::vector<int> &column_group() const { return column_group_; }
    int group_begin(int g) const { return group_begin_[g]; }
    int group_size(int g) const { return group_begin_[g + 1] - group_begin_[g]; }

    // Rank-k orthogonal projector of group g (materialized on demand; the
    // eigenvector matrix is the primary representation).
    Matrix projector(int g) const;
    std::vector<Matrix> projectors() const;

    // Functional calculus sum_i f(x_i) P_i.
    Matrix apply(const std::function<Complex(double)> &f) const;

    // Spectral projection X(B) for B given as a predicate on eigenvalues.
    Matrix spectral_projection(const std::function<bool(double)> &member) const;

  private:
    Matrix matrix_;
    Matrix vectors_;
    RealVector group_values_;
    std::vector<int> column_group_;
    std::vector<int> group_begin_;  // size groups()+1

    static HermitianObservable build(const Matrix &m, const Matrix &vectors,
                                     const RealVector &column_values, double gap_tol);
};

// sum_i f(x_i) P_i (free-function form of the spectral calculus).
Matrix function_of_observable(const std::function<Complex(double)> &f,
                              const HermitianObservable &x);

/// Trace-one positive matrix. Validation: Hermitian within 1e-12, trace one
/// within 1e-12, smallest eigenvalue >= -1e-12.
class DensityState {
  public:
    static DensityState from_matrix(const Matrix &m);
    static DensityState pure(const Vector &v);
    static DensityState diagonal(const RealVector &weights);
    static DensityState maximally_mixed(int dim);

    int dim() const { return static_cast<int>(matrix_.rows()); }
    const Matrix &matrix() const { return matrix_; }

  private:
    explicit DensityState(Matrix m) : matrix_(std::move(m)) {}
    Matrix matrix_;
};

// Tr[a rho]; real within 1e-12 when a is Hermitian.
Complex expectation(const Matrix &a, const DensityState &rho);

}  // namespace qmp
