#include "qmp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>

namespace qmp {

bool all_finite(const Matrix &m) {
    return m.allFinite();
}

bool is_hermitian(const Matrix &m, double tol) {
    if (m.rows() != m.cols()) return false;
    if (!m.allFinite()) return false;
    return max_abs(m - m.adjoint()) <= tol;
}

double max_abs(const Matrix &m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

double operator_norm(const Matrix &m) {
    if (m.size() == 0) return 0.0;
    // sqrt of the top eigenvalue of m^\dagger m; adequate down to ~1e-13 norms,
    // below which the value is dominated by the products' own rounding anyway.
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(m.adjoint() * m), Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double trace_distance(const Matrix &a, const Matrix &b) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(a - b), Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

Matrix tensor_product(const Matrix &a, const Matrix &b) {
    if (a.rows() != a.cols() || b.rows() != b.cols()) {
        throw DimensionMismatch("tensor_product requires square factors");
    }
    return Eigen::kroneckerProduct(a, b);
}

Matrix partial_trace_apparatus(const Matrix &t, int sys_dim, int app_dim) {
    if (sys_dim <= 0 || app_dim <= 0 ||
        t.rows() != t.cols() ||
        t.rows() != static_cast<Eigen::Index>(sys_dim) * app_dim) {
        throw DimensionMismatch("partial_trace_apparatus: dim(t) != sys_dim * app_dim");
    }
    Matrix out = Matrix::Zero(sys_dim, sys_dim);
    for (int a = 0; a < sys_dim; ++a) {
        for (int b = 0; b < sys_dim; ++b) {
            Complex acc = 0.0;
            for (int j = 0; j < app_dim; ++j) {
                acc += t(static_cast<Eigen::Index>(a) * app_dim + j,
                         static_cast<Eigen::Index>(b) * app_dim + j);
            }
            out(a, b) = acc;
        }
    }
    return out;
}

namespace {

// Largest-magnitude component of each column made real positive.
void fix_phases(Matrix &vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const double a = std::abs(vectors(r, c));
            if (a > best) {
                best = a;
                imax = r;
            }
        }
        if (best > 0.0) {
            const Complex phase = vectors(imax, c) / best;
            vectors.col(c) *= std::conj(phase);
        }
    }
}

}  // namespace

HermitianObservable HermitianObservable::build(const Matrix &m, const Matrix &vectors,
                                               const RealVector &column_values,
                                               double gap_tol) {
    const int n = static_cast<int>(m.rows());

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return column_values(a) < column_values(b); });

    HermitianObservable out;
    out.matrix_ = m;
    out.vectors_.resize(n, n);
    RealVector sorted(n);
    for (int c = 0; c < n; ++c) {
        out.vectors_.col(c) = vectors.col(order[c]);
        sorted(c) = column_values(order[c]);
    }
    fix_phases(out.vectors_);

    // Chain-merge: a new group starts when the gap to the previous eigenvalue
    // exceeds gap_tol.
    out.column_group_.assign(n, 0);
    out.group_begin_.clear();
    out.group_begin_.push_back(0);
    std::vector<double> values;
    double acc = sorted(0);
    int count = 1;
    for (int c = 1; c < n; ++c) {
        if (sorted(c) - sorted(c - 1) > gap_tol) {
            values.push_back(acc / count);
            out.group_begin_.push_back(c);
            acc = 0.0;
            count = 0;
        }
        out.column_group_[c] = static_cast<int>(values.size());
        acc += sorted(c);
        ++count;
    }
    values.push_back(acc / count);
    out.group_begin_.push_back(n);
    out.group_values_ = Eigen::Map<const RealVector>(values.data(),
                                                     static_cast<Eigen::Index>(values.size()));

    // Merging displaces eigenvalues by at most the spread of their group.
    double spread = 0.0;
    for (int c = 0; c < n; ++c) {
        spread = std::max(spread, std::abs(sorted(c) - out.group_values_(out.column_group_[c])));
    }
    const Matrix recon = out.apply([](double x) { return Complex(x, 0.0); });
    if (max_abs(recon - m) > 1e-10 + 2.0 * spread) {
        throw Error("spectral decomposition failed reconstruction check");
    }
    return out;
}

HermitianObservable HermitianObservable::decompose(const Matrix &m, double gap_tol) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionMismatch("spectral_decompose requires a nonempty square matrix");
    }
    if (!is_hermitian(m, 1e-10)) {
        throw NotHermitian("asymmetry exceeds 1e-10");
    }
    const Matrix herm = 0.5 * (m + m.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm);
    if (es.info() != Eigen::Success) {
        throw Error("eigensolver failed");
    }
    return build(herm, es.eigenvectors(), es.eigenvalues(), gap_tol);
}

HermitianObservable HermitianObservable::from_eigensystem(const Matrix &eigenvectors,
                                                          const RealVector &values,
                                                          double gap_tol) {
    const Eigen::Index n = eigenvectors.rows();
    if (eigenvectors.cols() != n || values.size() != n || n == 0) {
        throw DimensionMismatch("from_eigensystem: need n x n vectors and n values");
    }
    if (max_abs(Matrix(eigenvectors.adjoint() * eigenvectors) - Matrix::Identity(n, n)) > 1e-10) {
        throw Error("from_eigensystem: columns are not orthonormal");
    }
    Matrix m = eigenvectors * values.asDiagonal().toDenseMatrix().cast<Complex>() *
               eigenvectors.adjoint();
    m = 0.5 * (m + m.adjoint()).eval();
    return build(m, eigenvectors, values, gap_tol);
}

Matrix HermitianObservable::projector(int g) const {
    const auto block = vectors_.middleCols(group_begin_[g], group_size(g));
    return block * block.adjoint();
}

std::vector<Matrix> HermitianObservable::projectors() const {
    std::vector<Matrix> out;
    out.reserve(groups());
    for (int g = 0; g < groups(); ++g) out.push_back(projector(g));
    return out;
}

Matrix HermitianObservable::apply(const std::function<Complex(double)> &f) const {
    const int n = dim();
    Vector diag(n);
    for (int c = 0; c < n; ++c) diag(c) = f(group_values_(column_group_[c]));
    return vectors_ * diag.asDiagonal() * vectors_.adjoint();
}

Matrix HermitianObservable::spectral_projection(const std::function<bool(double)> &member) const {
    return apply([&](double x) { return member(x) ? Complex(1.0, 0.0) : Complex(0.0, 0.0); });
}

Matrix function_of_observable(const std::function<Complex(double)> &f,
                              const HermitianObservable &x) {
    return x.apply(f);
}

DensityState DensityState::from_matrix(const Matrix &m) {
    if (m.rows() != m.cols() || m.rows() == 0) {
        throw DimensionMismatch("density matrix must be square");
    }
    if (!is_hermitian(m, 1e-12)) {
        throw NotHermitian("density matrix asymmetry exceeds 1e-12");
    }
    const Matrix herm = 0.5 * (m + m.adjoint());
    if (std::abs(herm.trace() - Complex(1.0, 0.0)) > 1e-12) {
        throw Error("density matrix trace differs from one by more than 1e-12");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(herm, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-12) {
        throw Error("density matrix has an eigenvalue below -1e-12");
    }
    return DensityState(herm);
}

DensityState DensityState::pure(const Vector &v) {
    const double n = v.norm();
    if (!(n > 0.0) || !v.allFinite()) {
        throw Error("pure state vector must be nonzero and finite");
    }
    const Vector u = v / n;
    return DensityState(u * u.adjoint());
}

DensityState DensityState::diagonal(const RealVector &weights) {
    if (weights.size() == 0) throw BadSize("diagonal density needs at least one weight");
    if (weights.minCoeff() < 0.0) throw Error("diagonal density weights must be nonnegative");
    const double sum = weights.sum();
    if (!(sum > 0.0)) throw Error("diagonal density weights must not all vanish");
    Matrix m = Matrix::Zero(weights.size(), weights.size());
    for (Eigen::Index i = 0; i < weights.size(); ++i) m(i, i) = weights(i) / sum;
    return DensityState(std::move(m));
}

DensityState DensityState::maximally_mixed(int dim) {
    if (dim <= 0) throw BadSize("maximally_mixed needs dim >= 1");
    return DensityState(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

Complex expectation(const Matrix &a, const DensityState &rho) {
    if (a.rows() != a.cols() || a.rows() != rho.dim()) {
        throw DimensionMismatch("expectation: operator and state dimensions differ");
    }
    // Tr[a rho] = sum_{ij} a_ij rho_ji
    return (a.array() * rho.matrix().transpose().array()).sum();
}

}  // namespace qmp
