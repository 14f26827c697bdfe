#include <doctest.h>

#include <cmath>

#include "qmp/lattice.hpp"
#include "qmp/mean_kernel.hpp"
#include "qmp/random.hpp"

using namespace qmp;

namespace {

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

HermitianObservable diag01() {
    Matrix m = Matrix::Zero(2, 2);
    m(1, 1) = 1.0;
    return HermitianObservable::decompose(m);
}

// Pinching through explicit projector sandwiches, independent of the Schur path.
Matrix pinch_projector_route(const HermitianObservable &x, const Matrix &a) {
    Matrix acc = Matrix::Zero(x.dim(), x.dim());
    for (int i = 0; i < x.groups(); ++i) {
        const Matrix p = x.projector(i);
        acc += p * a * p;
    }
    return acc;
}

}  // namespace

TEST_CASE("kernel families: normalization, symmetry, boundedness") {
    const std::vector<MeanKernel> kernels = {
        MeanKernel::pinching(), MeanKernel::cesaro(10.0), MeanKernel::gaussian(2.0),
        MeanKernel::lattice_uniform(64, 16.0)};
    for (const auto &k : kernels) {
        CHECK(k(0.0) == 1.0);
        for (const double gap : {0.013, 0.7, 1.0, 3.9, 55.0}) {
            CHECK(k(gap) == doctest::Approx(k(-gap)).epsilon(1e-14));
            CHECK(std::abs(k(gap)) <= 1.0 + 1e-12);
        }
    }
}

TEST_CASE("cesaro kernel values") {
    const auto k = MeanKernel::cesaro(10.0);
    CHECK(k(1.0) == doctest::Approx(std::sin(10.0) / 10.0).epsilon(1e-15));
    CHECK(k(1e-12) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("lattice_uniform kernel is the comb on commensurate gaps") {
    const int n = 64;
    const double length = 16.0;
    const double dq = length / n;
    const auto k = MeanKernel::lattice_uniform(n, length);
    for (int m = 1; m < n; ++m) {
        CHECK(std::abs(k(m * dq)) <= 1e-12);
    }
    CHECK(k(0.0) == 1.0);
    CHECK(k(n * dq) == doctest::Approx(1.0).epsilon(1e-12));

    // agreement with the direct grid average at a generic gap
    const auto lat = Lattice::make(n, length);
    const double gap = 0.7361;
    Complex direct = 0.0;
    for (int j = 0; j < n; ++j) {
        direct += Complex(std::cos(lat.momentum(j) * gap), std::sin(lat.momentum(j) * gap));
    }
    CHECK(k(gap) == doctest::Approx((direct / double(n)).real()).epsilon(1e-12));
}

TEST_CASE("kernel spec parsing") {
    CHECK(MeanKernel::parse("pinching").family() == MeanKernel::Family::kExactPinching);
    const auto c = MeanKernel::parse("cesaro:T=10");
    CHECK(c(1.0) == doctest::Approx(std::sin(10.0) / 10.0));
    CHECK(MeanKernel::parse("gauss:tau=2").spec() == "gauss:tau=2");
    CHECK(MeanKernel::parse(MeanKernel::lattice_uniform(128, 64.0).spec())(0.0) == 1.0);

    CHECK_THROWS_AS(MeanKernel::parse("cesaro"), ConfigError);
    CHECK_THROWS_AS(MeanKernel::parse("gauss:sigma=2"), ConfigError);
    CHECK_THROWS_AS(MeanKernel::parse("abel:T=1"), ConfigError);
    CHECK_THROWS_AS(MeanKernel::parse(""), ConfigError);
    CHECK_THROWS_AS(MeanKernel::parse("cesaro:T=-3"), ConfigError);
}

TEST_CASE("conditional expectation: pinching on a nondegenerate observable") {
    Rng rng(9);
    const Matrix a = random_matrix(rng, 2);
    const Matrix out = conditional_expectation(diag01(), a, MeanKernel::pinching());
    CHECK(out(0, 1) == Complex(0.0, 0.0));
    CHECK(out(1, 0) == Complex(0.0, 0.0));
    CHECK(out(0, 0) == a(0, 0));
    CHECK(out(1, 1) == a(1, 1));
}

TEST_CASE("conditional expectation: fully degenerate observable is transparent") {
    const auto id = HermitianObservable::decompose(Matrix::Identity(3, 3));
    Rng rng(10);
    const Matrix a = random_matrix(rng, 3);
    for (const auto &k : {MeanKernel::pinching(), MeanKernel::cesaro(5.0),
                          MeanKernel::gaussian(1.0)}) {
        CHECK(max_abs(conditional_expectation(id, a, k) - a) <= 1e-14);
    }
}

TEST_CASE("cesaro channel scales off-diagonals by sinc, matching the u-quadrature") {
    const Matrix out = conditional_expectation(diag01(), sigma_x(), MeanKernel::cesaro(10.0));
    const double expected = std::sin(10.0) / 10.0;  // ~ -0.0544
    CHECK(out(0, 1).real() == doctest::Approx(expected).epsilon(1e-14));

    // Independent quadrature of (1/2T) int_-T^T e^{i u Delta} du.
    const UGrid grid = UGrid::uniform_window(10.0, 1e-3);
    const Complex quad =
        scalar_mean([](double u) { return Complex(std::cos(u), std::sin(u)); }, grid);
    CHECK(std::abs(quad - Complex(expected, 0)) <= 1e-6);
}

TEST_CASE("pinching fixes functions of X and kills complementary parts") {
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    const auto z = HermitianObservable::decompose(sz);
    const Matrix fz = z.apply([](double x) { return Complex(x * x - 0.5 * x, 0); });
    CHECK(max_abs(pinch(z, fz) - fz) <= 1e-14);
    CHECK(max_abs(pinch(z, sigma_x())) <= 1e-15);
}

TEST_CASE("pinching agrees with the projector route and is idempotent") {
    Rng rng(21);
    for (int inst = 0; inst < 5; ++inst) {
        const auto x = HermitianObservable::decompose(random_hermitian(rng, 5));
        const Matrix a = random_matrix(rng, 5);
        const Matrix schur = pinch(x, a);
        CHECK(max_abs(schur - pinch_projector_route(x, a)) <= 1e-13);
        CHECK(max_abs(pinch(x, schur) - schur) <= 1e-12);
    }
}

TEST_CASE("channel structure: unitality, bimodule, positivity, duality") {
    Rng rng(33);
    for (int inst = 0; inst < 10; ++inst) {
        const int d = 2 + inst % 5;
        const auto x = HermitianObservable::decompose(random_hermitian(rng, d));
        const MeanKernel k = inst % 2 ? MeanKernel::cesaro(3.0 + inst)
                                      : MeanKernel::gaussian(0.5 + 0.3 * inst);

        CHECK(max_abs(conditional_expectation(x, Matrix::Identity(d, d), k) -
                      Matrix::Identity(d, d)) <= 1e-12);

        const Matrix a = random_matrix(rng, d);
        const Matrix fx = x.apply([](double v) { return Complex(v * v, 0); });
        const Matrix gx = x.apply([](double v) { return Complex(1.0 - v, 0); });
        CHECK(max_abs(conditional_expectation(x, Matrix(fx * a * gx), k) -
                      fx * conditional_expectation(x, a, k) * gx) <= 1e-11);

        const Matrix psd = random_density(rng, d).matrix();
        const Matrix epsd = conditional_expectation(x, psd, k);
        Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (epsd + epsd.adjoint())),
                                                 Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() >= -1e-10);

        const auto rho = random_density(rng, d);
        const Complex lhs = (conditional_expectation(x, a, k) * rho.matrix()).trace();
        const Complex rhs = (a * conditional_expectation(x, rho.matrix(), k)).trace();
        CHECK(std::abs(lhs - rhs) <= 1e-11);
    }
}

TEST_CASE("idempotence fails visibly for a kernel that is not 0/1 valued") {
    const auto x = diag01();
    const auto k = MeanKernel::cesaro(10.0);
    const Matrix once = conditional_expectation(x, sigma_x(), k);
    const Matrix twice = conditional_expectation(x, once, k);
    const double s = std::sin(10.0) / 10.0;
    CHECK(operator_norm(twice - once) == doctest::Approx(std::abs(s * s - s)).epsilon(1e-10));
    CHECK(operator_norm(twice - once) > 0.01);
}

TEST_CASE("scalar_mean") {
    const UGrid grid = UGrid::uniform_window(5.0, 0.01);
    CHECK(std::abs(scalar_mean([](double) { return Complex(2.5, -1.0); }, grid) -
                   Complex(2.5, -1.0)) <= 1e-12);
    CHECK(std::abs(scalar_mean([](double u) { return Complex(u, 0); }, grid)) <= 1e-12);

    // e^{i u Delta} averaged over [-T, T] -> sin(T Delta)/(T Delta)
    const double delta = 0.8;
    const Complex mean = scalar_mean(
        [delta](double u) { return Complex(std::cos(u * delta), std::sin(u * delta)); }, grid);
    CHECK(std::abs(mean - Complex(std::sin(5.0 * delta) / (5.0 * delta), 0)) <= 1e-6);
}

TEST_CASE("u-grid validation") {
    UGrid grid = UGrid::uniform_window(2.0, 0.1);
    grid.validate();

    UGrid bad = grid;
    bad.weights(3) = -0.1;
    CHECK_THROWS_AS(bad.validate(), BadWeight);

    UGrid unnormalized = grid;
    unnormalized.weights *= 1.5;
    CHECK_THROWS_AS(unnormalized.validate(), BadWeight);

    CHECK_THROWS_AS(UGrid::uniform_window(-1.0, 0.1), BadWeight);
}

TEST_CASE("Q-pinching of any f(P) is a multiple of the identity") {
    const auto lat = Lattice::make(64, 16.0);
    const auto q = position_observable(lat);
    const auto p = momentum_observable(lat);
    const Matrix f_p = p.apply([](double v) { return Complex(std::cos(v), 0); });
    double avg = 0.0;
    for (int k = 0; k < lat.n(); ++k) avg += std::cos(lat.momentum(k));
    avg /= lat.n();
    CHECK(max_abs(pinch(q, f_p) - avg * Matrix::Identity(lat.n(), lat.n())) <= 1e-10);
}
