#include "qmp/process.hpp"

#include <algorithm>
#include <cmath>

namespace qmp {

Bins Bins::uniform(const Lattice &lat, int count) {
    if (count < 1) throw ConfigError("bin count must be >= 1");
    Bins bins;
    bins.edges.resize(count + 1);
    for (int b = 0; b <= count; ++b) {
        bins.edges(b) = -0.5 * lat.length() + lat.length() * b / count;
    }
    return bins;
}

Bins Bins::from_edges(RealVector edges) {
    if (edges.size() < 2) throw ConfigError("bins need at least two edges");
    for (Eigen::Index i = 1; i < edges.size(); ++i) {
        if (!(edges(i) > edges(i - 1))) throw ConfigError("bin edges must be strictly ascending");
    }
    Bins bins;
    bins.edges = std::move(edges);
    return bins;
}

int Bins::locate(double x) const {
    if (x < edges(0) || x >= edges(edges.size() - 1)) return -1;
    const double *begin = edges.data();
    const double *end = begin + edges.size();
    const auto it = std::upper_bound(begin, end, x);
    return static_cast<int>(it - begin) - 1;
}

MeasurementProcess MeasurementProcess::make(const HermitianObservable &x, const Lattice &lat,
                                            const ApparatusPreparation &preparation) {
    MeasurementProcess proc;
    proc.x_ = x;
    proc.lattice_ = lat;
    proc.preparation_ = preparation;

    if (preparation.wavefunction.lattice.n() != lat.n() ||
        preparation.wavefunction.lattice.length() != lat.length()) {
        throw DimensionMismatch("preparation lattice differs from process lattice");
    }

    const int groups = x.groups();
    proc.shifts_.resize(groups);
    int max_abs_shift = 0;
    for (int g = 0; g < groups; ++g) {
        const double ratio = x.eigenvalues()(g) / lat.dq();
        const double rounded = std::round(ratio);
        if (std::abs(ratio - rounded) > 1e-9) {
            throw NotCommensurate("eigenvalue " + std::to_string(x.eigenvalues()(g)) +
                                  " is not an integer multiple of dq");
        }
        proc.shifts_[g] = static_cast<int>(rounded);
        max_abs_shift = std::max(max_abs_shift, std::abs(proc.shifts_[g]));
    }

    const double s = preparation.position_width;
    if (!(max_abs_shift * lat.dq() + 3.0 * s < 0.5 * lat.length())) {
        throw SupportViolation("max|m_i| dq + 3 s >= L/2");
    }

    Vector c = preparation.wavefunction.coords();
    c /= c.norm();
    const int n = lat.n();
    proc.shifted_coords_.resize(groups, n);
    for (int g = 0; g < groups; ++g) {
        const int m = proc.shifts_[g];
        double outside = 0.0;
        for (int l = 0; l < n; ++l) {
            const Complex v = c(lat.wrap_site(static_cast<long>(l) - m));
            proc.shifted_coords_(g, l) = v;
            const double q = lat.position(l);
            if (q < -0.25 * lat.length() || q >= 0.25 * lat.length()) {
                outside += std::norm(v);
            }
        }
        if (outside >= 1e-10) {
            throw SupportViolation("shifted preparation mass outside the central half-window");
        }
    }
    return proc;
}

Vector evolve_pure(const MeasurementProcess &proc, const Vector &psi) {
    const HermitianObservable &x = proc.system_observable();
    const int d = x.dim();
    const int n = proc.lattice().n();
    if (psi.size() != d) throw DimensionMismatch("evolve_pure: system vector has wrong length");
    if (std::abs(psi.norm() - 1.0) > 1e-10) throw Error("evolve_pure: psi is not normalized");

    const Matrix &v = x.eigenvectors();
    const Vector phi = v.adjoint() * psi;
    Vector out = Vector::Zero(static_cast<Eigen::Index>(d) * n);
    for (int g = 0; g < x.groups(); ++g) {
        const int begin = x.group_begin(g);
        const int size = x.group_size(g);
        const Vector component = v.middleCols(begin, size) * phi.segment(begin, size);
        for (int a = 0; a < d; ++a) {
            if (component(a) == Complex(0.0, 0.0)) continue;
            out.segment(static_cast<Eigen::Index>(a) * n, n) +=
                component(a) * proc.shifted_coords().row(g).transpose();
        }
    }
    return out;
}

Matrix coupling_unitary(const MeasurementProcess &proc) {
    const HermitianObservable &x = proc.system_observable();
    const int d = x.dim();
    const int n = proc.lattice().n();
    const Eigen::Index dim = static_cast<Eigen::Index>(d) * n;
    if (dim > 4096) throw TooLarge("coupling_unitary: dim * n_points > 4096");

    Matrix u = Matrix::Zero(dim, dim);
    for (int g = 0; g < x.groups(); ++g) {
        const Matrix p = x.projector(g);
        const int m = proc.shift_sites(g);
        for (int a = 0; a < d; ++a) {
            for (int b = 0; b < d; ++b) {
                const Complex w = p(a, b);
                if (w == Complex(0.0, 0.0)) continue;
                for (int l = 0; l < n; ++l) {
                    const int src = proc.lattice().wrap_site(static_cast<long>(l) - m);
                    u(static_cast<Eigen::Index>(a) * n + l,
                      static_cast<Eigen::Index>(b) * n + src) += w;
                }
            }
        }
    }
    return u;
}

double heisenberg_pointer_check(const MeasurementProcess &proc,
                                const std::function<double(double)> &f) {
    const HermitianObservable &x = proc.system_observable();
    const Lattice &lat = proc.lattice();
    const int d = x.dim();
    const int n = lat.n();

    const Matrix u = coupling_unitary(proc);
    Matrix fq = Matrix::Zero(n, n);
    for (int l = 0; l < n; ++l) fq(l, l) = f(lat.position(l));
    const Matrix lhs = u.adjoint() * tensor_product(Matrix::Identity(d, d), fq) * u;

    Matrix rhs = Matrix::Zero(static_cast<Eigen::Index>(d) * n, static_cast<Eigen::Index>(d) * n);
    for (int g = 0; g < x.groups(); ++g) {
        const Matrix p = x.projector(g);
        Matrix shifted = Matrix::Zero(n, n);
        for (int l = 0; l < n; ++l) {
            // f at the cyclically wrapped coordinate q_l + m dq, exact on the grid
            shifted(l, l) = f(lat.position(lat.wrap_site(static_cast<long>(l) + proc.shift_sites(g))));
        }
        rhs += tensor_product(p, shifted);
    }
    return operator_norm(lhs - rhs);
}

namespace {

// Bin couplings A(b)(i,i') = sum_{l in b} conj(c_{l-m_i}) c_{l-m_i'}; every
// structured statistic of the process is a contraction of these Gram matrices
// against system-side weights Tr[. P_i rho P_i'].
struct Couplings {
    std::vector<Matrix> per_bin;  // each groups x groups, Hermitian PSD
    std::vector<int> site_bin;    // bin index per lattice site
};

Couplings bin_couplings(const MeasurementProcess &proc, const Bins &bins) {
    const int groups = proc.system_observable().groups();
    const int n = proc.lattice().n();
    Couplings cpl;
    cpl.per_bin.assign(bins.count(), Matrix::Zero(groups, groups));
    cpl.site_bin.resize(n);
    for (int l = 0; l < n; ++l) {
        const int b = bins.locate(proc.lattice().position(l));
        if (b < 0) throw ConfigError("bins do not cover the lattice range");
        cpl.site_bin[l] = b;
        for (int i = 0; i < groups; ++i) {
            const Complex ci = proc.shifted_coords()(i, l);
            for (int k = 0; k < groups; ++k) {
                cpl.per_bin[b](i, k) += std::conj(ci) * proc.shifted_coords()(k, l);
            }
        }
    }
    return cpl;
}

// W(i,i') = Tr[op P_i rho P_i'] in the eigenbasis of x.
Matrix system_weights(const HermitianObservable &x, const Matrix &op, const DensityState &rho) {
    const Matrix &v = x.eigenvectors();
    const Matrix op_eig = v.adjoint() * op * v;
    const Matrix rho_eig = v.adjoint() * rho.matrix() * v;
    const int groups = x.groups();
    Matrix w = Matrix::Zero(groups, groups);
    for (int i = 0; i < groups; ++i) {
        const int bi = x.group_begin(i), si = x.group_size(i);
        for (int k = 0; k < groups; ++k) {
            const int bk = x.group_begin(k), sk = x.group_size(k);
            // Tr[op P_i rho P_k] = Tr[(P_k op P_i)(P_i rho P_k)]
            w(i, k) = (op_eig.block(bk, bi, sk, si).array() *
                       rho_eig.block(bi, bk, si, sk).transpose().array())
                          .sum();
        }
    }
    return w;
}

}  // namespace

RealVector pointer_distribution(const MeasurementProcess &proc, const DensityState &rho,
                                const Bins &bins) {
    const HermitianObservable &x = proc.system_observable();
    if (rho.dim() != x.dim()) throw DimensionMismatch("pointer_distribution: state dimension");
    const Couplings cpl = bin_couplings(proc, bins);
    const Matrix wi = system_weights(x, Matrix::Identity(x.dim(), x.dim()), rho);
    RealVector p(bins.count());
    for (int b = 0; b < bins.count(); ++b) {
        double acc = 0.0;
        for (int i = 0; i < x.groups(); ++i) {
            acc += wi(i, i).real() * cpl.per_bin[b](i, i).real();
        }
        p(b) = acc;
    }
    return p;
}

SuccessiveJointDistribution successive_joint(const MeasurementProcess &proc,
                                             const DensityState &rho,
                                             const HermitianObservable &y, const Bins &bins) {
    const HermitianObservable &x = proc.system_observable();
    if (rho.dim() != x.dim() || y.dim() != x.dim()) {
        throw DimensionMismatch("successive_joint: dimensions differ");
    }
    const Couplings cpl = bin_couplings(proc, bins);

    SuccessiveJointDistribution joint;
    joint.pointer_bins = bins;
    joint.y_values = y.eigenvalues();
    joint.table.resize(bins.count(), y.groups());

    for (int j = 0; j < y.groups(); ++j) {
        const Matrix w = system_weights(x, y.projector(j), rho);
        for (int b = 0; b < bins.count(); ++b) {
            // p(b, y_j) = Tr[W A(b)]
            joint.table(b, j) = (w.array() * cpl.per_bin[b].transpose().array()).sum().real();
        }
    }

    const double total = joint.table.sum();
    if (std::abs(total - 1.0) > 1e-10) {
        throw Error("successive_joint: table mass differs from one by more than 1e-10");
    }
    if (joint.table.minCoeff() < -1e-12) {
        throw Error("successive_joint: negative probability beyond tolerance");
    }
    return joint;
}

RealVector SuccessiveJointDistribution::pointer_marginal() const {
    return table.rowwise().sum();
}

RealVector SuccessiveJointDistribution::y_marginal() const {
    return table.colwise().sum().transpose();
}

Matrix apparatus_contraction(const MeasurementProcess &proc, const Matrix &t) {
    const int d = proc.system_dim();
    const int n = proc.lattice().n();
    if (t.rows() != t.cols() || t.rows() != static_cast<Eigen::Index>(d) * n) {
        throw DimensionMismatch("apparatus_contraction: composite dimension mismatch");
    }
    Vector c = proc.preparation().wavefunction.coords();
    c /= c.norm();
    Matrix m(d, d);
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            m(a, b) = c.dot(t.block(static_cast<Eigen::Index>(a) * n,
                                    static_cast<Eigen::Index>(b) * n, n, n) *
                            c);
        }
    }
    return m;
}

double srinivas_gap(const MeasurementProcess &proc, const DensityState &rho,
                    const HermitianObservable &y, const Bins &bins,
                    const std::vector<int> &selected_bins, const MeanKernel &kernel) {
    const HermitianObservable &x = proc.system_observable();
    const Lattice &lat = proc.lattice();
    if (rho.dim() != x.dim() || y.dim() != x.dim()) {
        throw DimensionMismatch("srinivas_gap: dimensions differ");
    }
    if (selected_bins.empty()) throw BinMisaligned("empty bin selection");

    std::vector<char> selected(bins.count(), 0);
    for (const int b : selected_bins) {
        if (b < 0 || b >= bins.count()) throw BinMisaligned("selected bin index out of range");
        selected[b] = 1;
    }

    // Each eigenvalue must sit in the interior of its bin, at least half a
    // lattice cell away from every edge.
    const int groups = x.groups();
    std::vector<char> in_b(groups, 0);
    for (int i = 0; i < groups; ++i) {
        const double xi = x.eigenvalues()(i);
        const int b = bins.locate(xi);
        if (b < 0) throw BinMisaligned("eigenvalue outside the binned range");
        for (Eigen::Index e = 0; e < bins.edges.size(); ++e) {
            if (std::abs(xi - bins.edges(e)) < 0.5 * lat.dq() * (1.0 - 1e-9)) {
                throw BinMisaligned("eigenvalue within half a cell of a bin edge");
            }
        }
        in_b[i] = selected[b];
    }

    const Couplings cpl = bin_couplings(proc, bins);
    const Matrix w = system_weights(x, y.matrix(), rho);

    // A(B) and the per-eigenvalue in/out masses accumulated from the same
    // per-bin partial sums, so the complement identity is preserved.
    Matrix a_sel = Matrix::Zero(groups, groups);
    RealVector mass_in = RealVector::Zero(groups), mass_out = RealVector::Zero(groups);
    for (int b = 0; b < bins.count(); ++b) {
        if (selected[b]) a_sel += cpl.per_bin[b];
        for (int i = 0; i < groups; ++i) {
            (selected[b] ? mass_in(i) : mass_out(i)) += cpl.per_bin[b](i, i).real();
        }
    }

    if (kernel.family() == MeanKernel::Family::kExactPinching) {
        // LHS - RHS directly: cross blocks survive untouched, diagonal blocks
        // contribute -out_i (x_i in B) or +in_i (x_i not in B); out_i is a sum
        // of nonnegative terms, so tiny gaps keep relative precision.
        Complex cross = 0.0;
        for (int i = 0; i < groups; ++i) {
            for (int k = 0; k < groups; ++k) {
                if (i == k) continue;
                // term W(k,i) A(B)(i,k)
                cross += w(k, i) * a_sel(i, k);
            }
        }
        double diag = 0.0;
        for (int i = 0; i < groups; ++i) {
            const double z = mass_in(i) + mass_out(i);
            diag += w(i, i).real() * (in_b[i] ? -mass_out(i) / z : mass_in(i) / z);
        }
        return std::abs(cross.real() + diag);
    }

    // General kernel: plain |LHS - RHS|.
    Complex lhs = 0.0;
    for (int i = 0; i < groups; ++i) {
        for (int k = 0; k < groups; ++k) lhs += w(k, i) * a_sel(i, k);
    }
    const Matrix e_y = conditional_expectation(x, y.matrix(), kernel);
    const Matrix x_b = x.spectral_projection([&](double v) {
        const int b = bins.locate(v);
        return b >= 0 && selected[b];
    });
    const Complex rhs = expectation(x_b * e_y, rho);
    return std::abs(lhs - rhs);
}

DensityState posterior_state(const MeasurementProcess &proc, const DensityState &rho,
                             const Bins &bins, int bin_index) {
    const HermitianObservable &x = proc.system_observable();
    if (rho.dim() != x.dim()) throw DimensionMismatch("posterior_state: state dimension");
    if (bin_index < 0 || bin_index >= bins.count()) {
        throw BinMisaligned("posterior bin index out of range");
    }
    const Couplings cpl = bin_couplings(proc, bins);
    const Matrix &a = cpl.per_bin[bin_index];

    const Matrix &v = x.eigenvectors();
    const Matrix rho_eig = v.adjoint() * rho.matrix() * v;
    const int d = x.dim();
    const auto &grp = x.column_group();

    Matrix num(d, d);
    double prob = 0.0;
    for (int r = 0; r < d; ++r) {
        for (int c = 0; c < d; ++c) {
            num(r, c) = rho_eig(r, c) * a(grp[c], grp[r]);
        }
        prob += num(r, r).real();
    }
    if (prob <= 1e-12) throw ZeroProbability("pointer bin has probability <= 1e-12");
    const Matrix out = v * (num / prob) * v.adjoint();
    return DensityState::from_matrix(0.5 * (out + out.adjoint()));
}

}  // namespace qmp
