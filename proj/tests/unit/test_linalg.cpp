#include <doctest.h>

#include <cmath>

#include "qmp/linalg.hpp"
#include "qmp/random.hpp"

using namespace qmp;

namespace {

Matrix sigma_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Matrix sigma_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

// Index-loop partial trace, independent of the library implementation.
Matrix ptrace_oracle(const Matrix &t, int sys, int app) {
    Matrix out = Matrix::Zero(sys, sys);
    for (int a = 0; a < sys; ++a)
        for (int b = 0; b < sys; ++b)
            for (int j = 0; j < app; ++j) out(a, b) += t(a * app + j, b * app + j);
    return out;
}

}  // namespace

TEST_CASE("tensor_product identities") {
    CHECK(max_abs(tensor_product(Matrix::Identity(2, 2), Matrix::Identity(3, 3)) -
                  Matrix::Identity(6, 6)) == 0.0);

    Matrix d(2, 2);
    d << 1, 0, 0, 2;
    Matrix expect = Matrix::Zero(4, 4);
    expect(0, 0) = 1;
    expect(1, 1) = 1;
    expect(2, 2) = 2;
    expect(3, 3) = 2;
    CHECK(max_abs(tensor_product(d, Matrix::Identity(2, 2)) - expect) == 0.0);

    const Matrix k = tensor_product(sigma_x(), sigma_x());
    CHECK(max_abs(k * k - Matrix::Identity(4, 4)) == 0.0);

    Matrix rect(2, 3);
    CHECK_THROWS_AS(tensor_product(rect, rect), DimensionMismatch);
}

TEST_CASE("tensor_product associativity") {
    Matrix a(2, 2), b(2, 2), c(2, 2);
    a << 1, 2, 3, 4;
    b << 5, 6, 7, 8;
    c << 9, 10, 11, 12;
    CHECK(max_abs(tensor_product(tensor_product(a, b), c) -
                  tensor_product(a, tensor_product(b, c))) == 0.0);

    Rng rng(11);
    const Matrix ra = random_matrix(rng, 2), rb = random_matrix(rng, 3),
                 rc = random_matrix(rng, 2);
    CHECK(max_abs(tensor_product(tensor_product(ra, rb), rc) -
                  tensor_product(ra, tensor_product(rb, rc))) <= 1e-14);
}

TEST_CASE("spectral_decompose exact degeneracy and merging") {
    Matrix m = Matrix::Zero(3, 3);
    m(0, 0) = 3;
    m(1, 1) = 3;
    m(2, 2) = 5;
    const auto obs = HermitianObservable::decompose(m, 1e-8);
    REQUIRE(obs.groups() == 2);
    CHECK(obs.eigenvalues()(0) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(obs.eigenvalues()(1) == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(obs.projector(0).trace().real() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(obs.projector(1).trace().real() == doctest::Approx(1.0).epsilon(1e-12));

    Matrix near = Matrix::Zero(3, 3);
    near(0, 0) = 1.0;
    near(1, 1) = 1.0 + 1e-12;
    near(2, 2) = 2.0;
    const auto merged = HermitianObservable::decompose(near, 1e-9);
    REQUIRE(merged.groups() == 2);
    CHECK(merged.group_size(0) == 2);
    CHECK(merged.group_size(1) == 1);

    // Gaps just above the tolerance stay separate.
    Matrix spread = Matrix::Zero(3, 3);
    spread(1, 1) = 2e-9;
    spread(2, 2) = 4e-9;
    CHECK(HermitianObservable::decompose(spread, 1e-9).groups() == 3);
}

TEST_CASE("spectral_decompose of sigma_x against the closed-form 2x2 solver") {
    const auto obs = HermitianObservable::decompose(sigma_x());
    REQUIRE(obs.groups() == 2);
    // Closed form: eigenvalues -1, +1 with projectors (I -+ sigma_x)/2.
    CHECK(obs.eigenvalues()(0) == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(obs.eigenvalues()(1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(max_abs(obs.projector(0) - 0.5 * (Matrix::Identity(2, 2) - sigma_x())) <= 1e-12);
    CHECK(max_abs(obs.projector(1) - 0.5 * (Matrix::Identity(2, 2) + sigma_x())) <= 1e-12);
}

TEST_CASE("spectral_decompose rejects non-Hermitian input") {
    Matrix m = Matrix::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(HermitianObservable::decompose(m), NotHermitian);
}

TEST_CASE("spectral_decompose properties on random Hermitian matrices") {
    for (int seed = 0; seed < 20; ++seed) {
        Rng rng(100 + seed);
        const int d = 2 + seed % 7;
        const Matrix m = random_hermitian(rng, d);
        const auto obs = HermitianObservable::decompose(m);

        const Matrix recon = obs.apply([](double x) { return Complex(x, 0.0); });
        CHECK(max_abs(recon - m) <= 1e-10);

        Matrix sum = Matrix::Zero(d, d);
        for (int i = 0; i < obs.groups(); ++i) {
            const Matrix pi = obs.projector(i);
            sum += pi;
            for (int j = 0; j < obs.groups(); ++j) {
                const Matrix pj = obs.projector(j);
                const Matrix prod = pi * pj;
                CHECK(max_abs(prod - (i == j ? pi : Matrix::Zero(d, d))) <= 1e-10);
            }
        }
        CHECK(max_abs(sum - Matrix::Identity(d, d)) <= 1e-10);

        for (int i = 1; i < obs.groups(); ++i) {
            CHECK(obs.eigenvalues()(i) > obs.eigenvalues()(i - 1));
        }
    }
}

TEST_CASE("spectral_decompose is deterministic") {
    Rng rng(7);
    const Matrix m = random_hermitian(rng, 5);
    const auto a = HermitianObservable::decompose(m);
    const auto b = HermitianObservable::decompose(m);
    CHECK(max_abs(a.eigenvectors() - b.eigenvectors()) == 0.0);
}

TEST_CASE("function_of_observable") {
    const auto z = HermitianObservable::decompose(sigma_z());
    CHECK(max_abs(function_of_observable([](double x) { return Complex(x, 0); }, z) -
                  sigma_z()) <= 1e-14);

    // Indicator of {+1} is the projector onto |0>.
    Matrix e00 = Matrix::Zero(2, 2);
    e00(0, 0) = 1;
    CHECK(max_abs(function_of_observable(
                      [](double x) { return Complex(x > 0 ? 1.0 : 0.0, 0); }, z) -
                  e00) <= 1e-14);

    Matrix d01 = Matrix::Zero(2, 2);
    d01(1, 1) = 1;
    const auto obs01 = HermitianObservable::decompose(d01);
    const double pi = std::acos(-1.0);
    const Matrix phase = function_of_observable(
        [pi](double x) { return Complex(std::cos(pi * x), std::sin(pi * x)); }, obs01);
    Matrix expect(2, 2);
    expect << 1, 0, 0, -1;
    CHECK(max_abs(phase - expect) <= 1e-14);
}

TEST_CASE("functional calculus is multiplicative") {
    Rng rng(42);
    const auto obs = HermitianObservable::decompose(random_hermitian(rng, 6));
    const auto f = [](double x) { return Complex(std::sin(x), 0); };
    const auto g = [](double x) { return Complex(std::cos(x), 0); };
    const auto fg = [&](double x) { return f(x) * g(x); };
    CHECK(max_abs(obs.apply(fg) - obs.apply(f) * obs.apply(g)) <= 1e-10);
}

TEST_CASE("partial_trace_apparatus") {
    Rng rng(3);
    const Matrix a = random_matrix(rng, 3);
    const Matrix b = random_matrix(rng, 4);
    CHECK(max_abs(partial_trace_apparatus(tensor_product(a, b), 3, 4) - b.trace() * a) <= 1e-12);

    CHECK(max_abs(partial_trace_apparatus(Matrix::Identity(6, 6), 2, 3) -
                  3.0 * Matrix::Identity(2, 2)) == 0.0);

    // Bell-state projector traces to the maximally mixed state.
    Vector bell = Vector::Zero(4);
    bell(0) = 1.0 / std::sqrt(2.0);
    bell(3) = 1.0 / std::sqrt(2.0);
    const Matrix proj = bell * bell.adjoint();
    CHECK(max_abs(partial_trace_apparatus(proj, 2, 2) - 0.5 * Matrix::Identity(2, 2)) <= 1e-15);

    const Matrix t = random_matrix(rng, 6);
    CHECK(max_abs(partial_trace_apparatus(t, 2, 3) - ptrace_oracle(t, 2, 3)) <= 1e-14);
    CHECK(std::abs(partial_trace_apparatus(t, 2, 3).trace() - t.trace()) <= 1e-12);

    CHECK_THROWS_AS(partial_trace_apparatus(t, 2, 4), DimensionMismatch);
}

TEST_CASE("expectation") {
    const auto plus = DensityState::pure((Vector(2) << 1, 1).finished());
    CHECK(std::abs(expectation(Matrix::Identity(2, 2), plus) - 1.0) <= 1e-14);
    CHECK(std::abs(expectation(sigma_z(), plus)) <= 1e-14);

    RealVector w(2);
    w << 0.7, 0.3;
    CHECK(std::abs(expectation(sigma_z(), DensityState::diagonal(w)) - 0.4) <= 1e-14);

    CHECK_THROWS_AS(expectation(Matrix::Identity(3, 3), plus), DimensionMismatch);
}

TEST_CASE("DensityState validation") {
    CHECK_THROWS(DensityState::from_matrix(2.0 * Matrix::Identity(2, 2)));  // trace 4

    Matrix neg = Matrix::Zero(2, 2);
    neg(0, 0) = 1.5;
    neg(1, 1) = -0.5;
    CHECK_THROWS(DensityState::from_matrix(neg));

    Matrix skew(2, 2);
    skew << 0.5, Complex(0, 0.2), Complex(0, 0.2), 0.5;
    CHECK_THROWS_AS(DensityState::from_matrix(skew), NotHermitian);

    const auto mixed = DensityState::maximally_mixed(3);
    CHECK(std::abs(mixed.matrix().trace() - Complex(1, 0)) <= 1e-15);

    Rng rng(5);
    const auto rho = random_density(rng, 4);
    CHECK(std::abs(rho.matrix().trace().real() - 1.0) <= 1e-12);
}

TEST_CASE("operator_norm and trace_distance") {
    CHECK(operator_norm(sigma_x()) == doctest::Approx(1.0).epsilon(1e-12));
    Matrix r1 = Matrix::Zero(2, 2);
    r1(0, 0) = 3.0;
    CHECK(operator_norm(r1) == doctest::Approx(3.0).epsilon(1e-12));

    const auto p0 = DensityState::pure((Vector(2) << 1, 0).finished());
    const auto p1 = DensityState::pure((Vector(2) << 0, 1).finished());
    CHECK(trace_distance(p0.matrix(), p1.matrix()) == doctest::Approx(1.0).epsilon(1e-12));
}
