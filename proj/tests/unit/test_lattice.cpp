#include <doctest.h>

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qmp/lattice.hpp"
#include "qmp/random.hpp"

using namespace qmp;

TEST_CASE("lattice grids") {
    const auto lat = Lattice::make(16, 16.0);
    CHECK(lat.dq() == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(lat.position(0) == doctest::Approx(-8.0));
    CHECK(lat.position(15) == doctest::Approx(7.0));
    CHECK(lat.dp() == doctest::Approx(2.0 * std::numbers::pi / 16.0).epsilon(1e-15));

    const auto lat2 = Lattice::make(64, 32.0);
    CHECK(lat2.dq() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(lat2.momentum(63) == doctest::Approx(2.0 * std::numbers::pi * 31.0 / 32.0).epsilon(1e-14));

    for (const auto &[n, len] : {std::pair{16, 5.0}, {128, 64.0}, {1024, 7.5}}) {
        const auto l = Lattice::make(n, len);
        CHECK(std::abs(l.dq() * l.dp() * n - 2.0 * std::numbers::pi) <= 1e-12);
    }
}

TEST_CASE("lattice size guards") {
    CHECK_THROWS_AS(Lattice::make(15, 16.0), BadSize);
    CHECK_THROWS_AS(Lattice::make(24, 16.0), BadSize);
    CHECK_THROWS_AS(Lattice::make(8, 16.0), BadSize);
    CHECK_THROWS_AS(Lattice::make(16, 0.0), BadSize);
    CHECK_THROWS_AS(Lattice::make(16, -2.0), BadSize);
}

TEST_CASE("wrap helpers") {
    const auto lat = Lattice::make(16, 16.0);
    CHECK(lat.wrap_site(-1) == 15);
    CHECK(lat.wrap_site(16) == 0);
    CHECK(lat.wrap_coordinate(8.0) == doctest::Approx(-8.0));
    CHECK(lat.wrap_coordinate(-8.5) == doctest::Approx(7.5));
    CHECK(lat.wrap_coordinate(3.0) == doctest::Approx(3.0));
}

TEST_CASE("dft is unitary and invertible") {
    const auto lat = Lattice::make(64, 16.0);
    Rng rng(17);
    Vector c(64);
    for (int i = 0; i < 64; ++i) c(i) = Complex(normal_double(rng), normal_double(rng));
    const Vector f = lat.dft(c);
    CHECK(std::abs(f.norm() - c.norm()) <= 1e-12);
    CHECK((lat.idft(f) - c).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("Parseval for wavefunctions") {
    const auto lat = Lattice::make(128, 32.0);
    for (int seed = 0; seed < 10; ++seed) {
        Rng rng(2000 + seed);
        Vector amp(lat.n());
        for (int i = 0; i < lat.n(); ++i) amp(i) = Complex(normal_double(rng), normal_double(rng));
        amp /= std::sqrt(amp.squaredNorm() * lat.dq());
        const WaveFunction wf{lat, amp};
        CHECK(std::abs(wf.norm_squared() - wf.momentum_density().sum() * lat.dp()) <= 1e-12);
    }
}

TEST_CASE("position observable is the coordinate diagonal") {
    const auto lat = Lattice::make(16, 16.0);
    const auto q = position_observable(lat);
    for (int j = 0; j < 16; ++j) {
        CHECK(q.matrix()(j, j).real() == doctest::Approx(lat.position(j)));
    }
    CHECK(q.groups() == 16);
}

TEST_CASE("momentum observable") {
    const auto lat = Lattice::make(64, 32.0);
    const auto p = momentum_observable(lat);

    CHECK(max_abs(p.matrix() - p.matrix().adjoint()) <= 1e-10);

    // The constant vector is the zero-momentum eigenstate.
    const Vector ones = Vector::Ones(lat.n()) / std::sqrt(double(lat.n()));
    CHECK((p.matrix() * ones).cwiseAbs().maxCoeff() <= 1e-10);

    // Dense eigensolver oracle: the spectrum is exactly the momentum grid.
    Eigen::SelfAdjointEigenSolver<Matrix> es(p.matrix(), Eigen::EigenvaluesOnly);
    RealVector sorted = lat.momenta();
    std::sort(sorted.data(), sorted.data() + sorted.size());
    CHECK((es.eigenvalues() - sorted).cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("gaussian packet moments in the resolvable regime") {
    const auto lat = Lattice::make(256, 64.0);
    for (const double s : {0.2, 0.5, 1.0, 2.0}) {
        const auto wf = gaussian_packet(lat, 0.0, 0.0, s);
        CHECK(std::abs(wf.norm_squared() - 1.0) <= 1e-12);
        CHECK(std::abs(wf.position_mean()) <= 1e-10);
        CHECK(std::abs(wf.position_std() - s) <= 0.02 * s);
        CHECK(std::abs(wf.momentum_std() - 1.0 / (2.0 * s)) <= 0.05 / (2.0 * s));
        // Gaussians saturate the uncertainty bound.
        CHECK(wf.position_std() * wf.momentum_std() >= 0.5 * (1.0 - 0.02));
    }
}

TEST_CASE("gaussian packet symmetry and modulation") {
    const auto lat = Lattice::make(256, 64.0);
    const auto centered = gaussian_packet(lat, 0.0, 0.0, 0.7);
    CHECK(centered.amplitudes.imag().cwiseAbs().maxCoeff() <= 1e-15);
    for (int j = 1; j < lat.n(); ++j) {
        // |alpha(q)| = |alpha(-q)| on the symmetric grid
        CHECK(std::abs(std::abs(centered.amplitudes(j)) -
                       std::abs(centered.amplitudes(lat.n() - j))) <= 1e-12);
    }

    const double p0 = 2.0;
    const auto boosted = gaussian_packet(lat, 0.0, p0, 0.7);
    const RealVector density = boosted.momentum_density();
    int argmax = 0;
    density.maxCoeff(&argmax);
    CHECK(std::abs(lat.momentum(argmax) - p0) <= lat.dp());

    const auto shifted = gaussian_packet(lat, 3.0, 0.0, 0.5);
    CHECK(std::abs(shifted.position_mean() - 3.0) <= 1e-8);
}

TEST_CASE("sub-cell packets still concentrate in position") {
    const auto lat = Lattice::make(256, 64.0);
    const auto wf = gaussian_packet(lat, 0.0, 0.0, 0.05);  // s << dq
    double cosq = 0.0;
    for (int j = 0; j < lat.n(); ++j) {
        cosq += std::cos(lat.position(j)) * std::norm(wf.amplitudes(j)) * lat.dq();
    }
    CHECK(cosq >= 0.999);
}

TEST_CASE("gaussian packet support guards") {
    const auto lat = Lattice::make(256, 64.0);
    CHECK_THROWS_AS(gaussian_packet(lat, 0.0, 0.0, 6.0), SupportViolation);   // 3s >= L/4
    CHECK_THROWS_AS(gaussian_packet(lat, 31.0, 0.0, 0.5), SupportViolation);  // q0 too close
    CHECK_THROWS_AS(gaussian_packet(lat, 0.0, 0.0, -0.1), SupportViolation);
}
