#include "qmp/oracles.hpp"

#include <cmath>
#include <sstream>

#include "qmp/random.hpp"

namespace qmp {

double LuedersTable::restricted_y_mean(const std::function<bool(double)> &in_b) const {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x_values.size(); ++i) {
        if (!in_b(x_values(i))) continue;
        for (Eigen::Index j = 0; j < y_values.size(); ++j) {
            acc += y_values(j) * p(i, j);
        }
    }
    return acc;
}

LuedersTable lueders_successive_oracle(const HermitianObservable &x,
                                       const HermitianObservable &y, const DensityState &rho) {
    if (x.dim() != y.dim() || x.dim() != rho.dim()) {
        throw DimensionMismatch("lueders_successive_oracle: dimensions differ");
    }
    LuedersTable table;
    table.x_values = x.eigenvalues();
    table.y_values = y.eigenvalues();
    table.p.resize(x.groups(), y.groups());
    for (int i = 0; i < x.groups(); ++i) {
        const Matrix pi = x.projector(i);
        const Matrix conditioned = pi * rho.matrix() * pi;
        for (int j = 0; j < y.groups(); ++j) {
            table.p(i, j) = (y.projector(j) * conditioned).trace().real();
        }
    }
    return table;
}

Matrix ugrid_mean_oracle(const HermitianObservable &x, const Matrix &a, const UGrid &grid) {
    if (a.rows() != a.cols() || a.rows() != x.dim()) {
        throw DimensionMismatch("ugrid_mean_oracle: operator does not match observable");
    }
    grid.validate();
    const double max_gap =
        x.eigenvalues()(x.groups() - 1) - x.eigenvalues()(0);
    if (max_gap > 0.0 && grid.du * max_gap > 0.1 * (1.0 + 1e-12)) {
        throw GridTooCoarse("du * max_gap > 0.1");
    }
    Matrix acc = Matrix::Zero(x.dim(), x.dim());
    for (Eigen::Index i = 0; i < grid.points.size(); ++i) {
        const double u = grid.points(i);
        const Matrix e_plus = x.apply([u](double v) {
            return Complex(std::cos(u * v), std::sin(u * v));
        });
        acc += (grid.weights(i) * grid.du) * (e_plus * a * e_plus.adjoint());
    }
    return acc;
}

double dense_unitary_oracle(const MeasurementProcess &proc) {
    const int d = proc.system_dim();
    const int n = proc.lattice().n();
    if (static_cast<long>(d) * n > 512) throw TooLarge("dense_unitary_oracle: dim * n_points > 512");

    const Matrix h = tensor_product(proc.system_observable().matrix(),
                                    momentum_observable(proc.lattice()).matrix());
    const HermitianObservable hobs = HermitianObservable::decompose(h);
    const Matrix expm = hobs.apply([](double v) {
        return Complex(std::cos(-v), std::sin(-v));  // t lambda = 1
    });
    return max_abs(expm - coupling_unitary(proc));
}

OracleReport run_lueders_oracle(std::uint64_t seed) {
    Rng rng(seed);
    OracleReport report;
    report.name = "lueders_successive";
    for (int inst = 0; inst < 8; ++inst) {
        const int d = 2 + inst % 4;
        const HermitianObservable x =
            random_observable_with_spectrum(rng, RealVector::LinSpaced(d, 0.0, d - 1.0));
        const Matrix ym = random_hermitian(rng, d);
        const HermitianObservable y = HermitianObservable::decompose(ym);
        const DensityState rho = random_density(rng, d);
        const LuedersTable table = lueders_successive_oracle(x, y, rho);

        // Identity: the y-mean restricted to each x outcome equals
        // Tr[P_i (sum_k P_k Y P_k) rho] with the pinching formed from projectors.
        Matrix pinched = Matrix::Zero(d, d);
        for (int k = 0; k < x.groups(); ++k) {
            const Matrix pk = x.projector(k);
            pinched += pk * ym * pk;
        }
        double err = std::abs(table.p.sum() - 1.0);
        for (int i = 0; i < x.groups(); ++i) {
            const double xi = x.eigenvalues()(i);
            const double lhs = table.restricted_y_mean([xi](double v) { return v == xi; });
            const double rhs = (x.projector(i) * pinched * rho.matrix()).trace().real();
            err = std::max(err, std::abs(lhs - rhs));
        }
        if (err > report.max_abs_error) {
            report.max_abs_error = err;
            std::ostringstream what;
            what << "d=" << d << " instance=" << inst << " seed=" << seed;
            report.worst_instance = what.str();
        }
        ++report.instances_tested;
    }
    return report;
}

OracleReport run_ugrid_oracle(std::uint64_t seed) {
    Rng rng(seed);
    OracleReport report;
    report.name = "ugrid_mean";
    for (int inst = 0; inst < 3; ++inst) {
        const int d = 3 + inst;
        const RealVector spectrum = RealVector::LinSpaced(d, 0.0, d - 1.0);
        const HermitianObservable x = random_observable_with_spectrum(rng, spectrum);
        const Matrix a = random_hermitian(rng, d);
        const double max_gap = spectrum(d - 1) - spectrum(0);

        // Gaussian weight with tau * min_gap = 10: indistinguishable from pinching.
        const UGrid grid = UGrid::gaussian(10.0, 0.05 / max_gap);
        const Matrix averaged = ugrid_mean_oracle(x, a, grid);
        const Matrix pinched = conditional_expectation(x, a, MeanKernel::pinching());
        const double err = max_abs(averaged - pinched);
        if (err > report.max_abs_error) {
            report.max_abs_error = err;
            std::ostringstream what;
            what << "d=" << d << " gaussian tau=10 seed=" << seed;
            report.worst_instance = what.str();
        }
        ++report.instances_tested;
    }
    return report;
}

OracleReport run_dense_unitary_oracle(std::uint64_t seed) {
    Rng rng(seed);
    OracleReport report;
    report.name = "dense_unitary";
    const struct {
        int d, n, mult;
    } cases[] = {{1, 32, 0}, {2, 32, 1}, {3, 64, 2}};
    for (const auto &c : cases) {
        const Lattice lat = Lattice::make(c.n, 16.0);
        RealVector spectrum(c.d);
        for (int i = 0; i < c.d; ++i) {
            spectrum(i) = lat.dq() * (c.mult * (i - c.d / 2));
        }
        const HermitianObservable x =
            c.d == 1 ? HermitianObservable::decompose(Matrix::Zero(1, 1))
                     : random_observable_with_spectrum(rng, spectrum);
        const auto prep = ApparatusPreparation::make(lat, MomentumShape::kGaussian, 0.35);
        const auto proc = MeasurementProcess::make(x, lat, prep);
        const double err = dense_unitary_oracle(proc);
        if (err > report.max_abs_error) {
            report.max_abs_error = err;
            std::ostringstream what;
            what << "d=" << c.d << " N=" << c.n << " seed=" << seed;
            report.worst_instance = what.str();
        }
        ++report.instances_tested;
    }
    return report;
}

}  // namespace qmp
