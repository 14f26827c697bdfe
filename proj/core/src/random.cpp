#include "qmp/random.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace qmp {

double uniform_double(Rng &rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double normal_double(Rng &rng) {
    double u1 = uniform_double(rng);
    while (u1 <= 0.0) u1 = uniform_double(rng);
    const double u2 = uniform_double(rng);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

Matrix ginibre(Rng &rng, int dim) {
    Matrix g(dim, dim);
    for (int r = 0; r < dim; ++r) {
        for (int c = 0; c < dim; ++c) {
            g(r, c) = Complex(normal_double(rng), normal_double(rng));
        }
    }
    return g;
}

}  // namespace

Matrix random_matrix(Rng &rng, int dim) {
    return ginibre(rng, dim);
}

Matrix random_hermitian(Rng &rng, int dim) {
    const Matrix g = ginibre(rng, dim);
    Matrix h = 0.5 * (g + g.adjoint());
    const double norm = operator_norm(h);
    if (norm > 0.0) h /= norm;
    return h;
}

Matrix random_unitary(Rng &rng, int dim) {
    const Matrix g = ginibre(rng, dim);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int c = 0; c < dim; ++c) {
        const Complex d = r(c, c);
        const double a = std::abs(d);
        if (a > 0.0) q.col(c) *= d / a;
    }
    return q;
}

Vector random_state_vector(Rng &rng, int dim) {
    Vector v(dim);
    for (int i = 0; i < dim; ++i) v(i) = Complex(normal_double(rng), normal_double(rng));
    return v / v.norm();
}

DensityState random_density(Rng &rng, int dim) {
    const Matrix g = ginibre(rng, dim);
    Matrix m = g * g.adjoint();
    m /= m.trace().real();
    return DensityState::from_matrix(0.5 * (m + m.adjoint()));
}

HermitianObservable random_observable_with_spectrum(Rng &rng, const RealVector &spectrum,
                                                    double gap_tol) {
    const Matrix v = random_unitary(rng, static_cast<int>(spectrum.size()));
    return HermitianObservable::from_eigensystem(v, spectrum, gap_tol);
}

}  // namespace qmp
