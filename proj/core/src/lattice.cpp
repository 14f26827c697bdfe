#include "qmp/lattice.hpp"

#include <cmath>
#include <numbers>

namespace qmp {

namespace {

bool power_of_two(int n) {
    return n > 0 && (n & (n - 1)) == 0;
}

}  // namespace

Lattice Lattice::make(int n_points, double length) {
    if (!power_of_two(n_points) || n_points < 16) {
        throw BadSize("n_points must be a power of two >= 16");
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw BadSize("length must be positive and finite");
    }
    Lattice lat;
    lat.n_ = n_points;
    lat.length_ = length;
    lat.dq_ = length / n_points;
    lat.dp_ = 2.0 * std::numbers::pi / length;
    lat.positions_.resize(n_points);
    lat.momenta_.resize(n_points);
    for (int j = 0; j < n_points; ++j) {
        lat.positions_(j) = (j - n_points / 2) * lat.dq_;
        lat.momenta_(j) = (j - n_points / 2) * lat.dp_;
    }
    lat.roots_.resize(n_points);
    for (int r = 0; r < n_points; ++r) {
        const double phase = -2.0 * std::numbers::pi * r / n_points;
        lat.roots_[r] = Complex(std::cos(phase), std::sin(phase));
    }
    return lat;
}

double Lattice::wrap_coordinate(double x) const {
    double y = std::fmod(x + 0.5 * length_, length_);
    if (y < 0.0) y += length_;
    return y - 0.5 * length_;
}

// p_k q_j = (2*pi/n) (k - n/2)(j - n/2); the phase lives on the n-th roots of
// unity, so the transform is evaluated through the exact root table.
Vector Lattice::dft(const Vector &coords) const {
    if (coords.size() != n_) throw DimensionMismatch("dft: coordinate length != n");
    const long n = n_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    Vector out(n_);
    for (long k = 0; k < n; ++k) {
        const long kt = k - n / 2;
        Complex acc = 0.0;
        for (long j = 0; j < n; ++j) {
            const long r = ((kt * (j - n / 2)) % n + n) % n;
            acc += roots_[static_cast<size_t>(r)] * coords(j);
        }
        out(k) = acc * scale;
    }
    return out;
}

Vector Lattice::idft(const Vector &coords) const {
    if (coords.size() != n_) throw DimensionMismatch("idft: coordinate length != n");
    const long n = n_;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n_));
    Vector out(n_);
    for (long j = 0; j < n; ++j) {
        const long jt = j - n / 2;
        Complex acc = 0.0;
        for (long k = 0; k < n; ++k) {
            const long r = ((jt * (k - n / 2)) % n + n) % n;
            acc += std::conj(roots_[static_cast<size_t>(r)]) * coords(k);
        }
        out(j) = acc * scale;
    }
    return out;
}

double WaveFunction::norm_squared() const {
    return amplitudes.squaredNorm() * lattice.dq();
}

Vector WaveFunction::coords() const {
    return amplitudes * std::sqrt(lattice.dq());
}

Vector WaveFunction::momentum_coords() const {
    return lattice.dft(coords());
}

RealVector WaveFunction::position_density() const {
    return amplitudes.cwiseAbs2();
}

RealVector WaveFunction::momentum_density() const {
    return momentum_coords().cwiseAbs2() / lattice.dp();
}

namespace {

double density_mean(const RealVector &grid, const RealVector &density, double step) {
    const double mass = density.sum() * step;
    return grid.dot(density) * step / mass;
}

double density_std(const RealVector &grid, const RealVector &density, double step) {
    const double mass = density.sum() * step;
    const double mean = grid.dot(density) * step / mass;
    const double m2 = (grid.array() - mean).square().matrix().dot(density) * step / mass;
    return std::sqrt(std::max(0.0, m2));
}

}  // namespace

double WaveFunction::position_mean() const {
    return density_mean(lattice.positions(), position_density(), lattice.dq());
}

double WaveFunction::position_std() const {
    return density_std(lattice.positions(), position_density(), lattice.dq());
}

double WaveFunction::momentum_mean() const {
    return density_mean(lattice.momenta(), momentum_density(), lattice.dp());
}

double WaveFunction::momentum_std() const {
    return density_std(lattice.momenta(), momentum_density(), lattice.dp());
}

WaveFunction gaussian_packet(const Lattice &lat, double q0, double p0, double s) {
    if (!(s > 0.0)) throw SupportViolation("packet width must be positive");
    if (!(3.0 * s < lat.length() / 4.0)) {
        throw SupportViolation("3s >= L/4");
    }
    if (!(std::abs(q0) + 3.0 * s < lat.length() / 2.0)) {
        throw SupportViolation("|q0| + 3s >= L/2");
    }
    Vector amp(lat.n());
    for (int j = 0; j < lat.n(); ++j) {
        const double q = lat.position(j);
        const double envelope = std::exp(-(q - q0) * (q - q0) / (4.0 * s * s));
        amp(j) = envelope * Complex(std::cos(p0 * q), std::sin(p0 * q));
    }
    const double norm2 = amp.squaredNorm() * lat.dq();
    amp /= std::sqrt(norm2);
    return WaveFunction{lat, std::move(amp)};
}

HermitianObservable position_observable(const Lattice &lat) {
    const int n = lat.n();
    return HermitianObservable::from_eigensystem(Matrix::Identity(n, n), lat.positions());
}

HermitianObservable momentum_observable(const Lattice &lat) {
    const int n = lat.n();
    // Column for p_k is the plane wave F^dagger e_k, components e^{i p_k q_j}/sqrt(n).
    Matrix v(n, n);
    Vector basis(n);
    for (int k = 0; k < n; ++k) {
        basis.setZero();
        basis(k) = 1.0;
        v.col(k) = lat.idft(basis);
    }
    return HermitianObservable::from_eigensystem(v, lat.momenta());
}

}  // namespace qmp
