#include "qmp/mean_kernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace qmp {

MeanKernel MeanKernel::pinching() {
    MeanKernel k;
    k.family_ = Family::kExactPinching;
    return k;
}

MeanKernel MeanKernel::cesaro(double window) {
    if (!(window > 0.0)) throw ConfigError("cesaro window T must be positive");
    MeanKernel k;
    k.family_ = Family::kCesaro;
    k.param_ = window;
    return k;
}

MeanKernel MeanKernel::gaussian(double tau) {
    if (!(tau > 0.0)) throw ConfigError("gaussian weight tau must be positive");
    MeanKernel k;
    k.family_ = Family::kGaussian;
    k.param_ = tau;
    return k;
}

MeanKernel MeanKernel::lattice_uniform(int n_points, double length) {
    if (n_points < 2 || !(length > 0.0)) {
        throw ConfigError("lattice_uniform needs n >= 2 and L > 0");
    }
    MeanKernel k;
    k.family_ = Family::kLatticeUniform;
    k.n_points_ = n_points;
    k.length_ = length;
    return k;
}

namespace {

double sinc(double x) {
    if (std::abs(x) < 1e-8) return 1.0 - x * x / 6.0;
    return std::sin(x) / x;
}

double parse_value(const std::string &spec, const std::string &key) {
    const auto pos = spec.find(key + "=");
    if (pos == std::string::npos) throw ConfigError("kernel spec '" + spec + "' lacks " + key);
    std::istringstream in(spec.substr(pos + key.size() + 1));
    double v = 0.0;
    if (!(in >> v)) throw ConfigError("kernel spec '" + spec + "' has malformed " + key);
    return v;
}

}  // namespace

MeanKernel MeanKernel::parse(const std::string &spec) {
    if (spec == "pinching") return pinching();
    if (spec.rfind("cesaro:", 0) == 0) return cesaro(parse_value(spec, "T"));
    if (spec.rfind("gauss:", 0) == 0) return gaussian(parse_value(spec, "tau"));
    if (spec.rfind("lattice:", 0) == 0) {
        const int n = static_cast<int>(parse_value(spec, "n"));
        return lattice_uniform(n, parse_value(spec, "L"));
    }
    throw ConfigError("unknown kernel spec '" + spec + "'");
}

double MeanKernel::operator()(double gap) const {
    switch (family_) {
        case Family::kExactPinching:
            return gap == 0.0 ? 1.0 : 0.0;
        case Family::kCesaro:
            return sinc(param_ * gap);
        case Family::kGaussian:
            return std::exp(-0.5 * param_ * param_ * gap * gap);
        case Family::kLatticeUniform: {
            // (1/n) Re sum_{kt=-n/2}^{n/2-1} e^{i kt dp gap}
            //   = cos(x/2) sin(n x/2) / (n sin(x/2)),  x = dp * gap.
            const double x = 2.0 * std::numbers::pi * gap / length_;
            const double half = 0.5 * x;
            if (std::abs(std::sin(half)) < 1e-12) {
                return 1.0;  // gap is a multiple of n dq: full comb (n even)
            }
            return std::cos(half) * std::sin(0.5 * n_points_ * x) /
                   (n_points_ * std::sin(half));
        }
    }
    return 0.0;
}

std::string MeanKernel::spec() const {
    std::ostringstream out;
    switch (family_) {
        case Family::kExactPinching: out << "pinching"; break;
        case Family::kCesaro: out << "cesaro:T=" << param_; break;
        case Family::kGaussian: out << "gauss:tau=" << param_; break;
        case Family::kLatticeUniform:
            out << "lattice:n=" << n_points_ << ",L=" << length_;
            break;
    }
    return out.str();
}

Matrix conditional_expectation(const HermitianObservable &x, const Matrix &a,
                               const MeanKernel &kernel, double gap_tol) {
    if (a.rows() != a.cols() || a.rows() != x.dim()) {
        throw DimensionMismatch("conditional_expectation: operator does not match observable");
    }
    const Matrix &v = x.eigenvectors();
    Matrix b = v.adjoint() * a * v;
    const int n = x.dim();
    const auto &groups = x.column_group();
    const RealVector &vals = x.eigenvalues();
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            const double gap = vals(groups[r]) - vals(groups[c]);
            const double factor = std::abs(gap) <= gap_tol ? 1.0 : kernel(gap);
            b(r, c) *= factor;
        }
    }
    return v * b * v.adjoint();
}

Matrix pinch(const HermitianObservable &x, const Matrix &a) {
    return conditional_expectation(x, a, MeanKernel::pinching());
}

UGrid UGrid::uniform_window(double half_width, double du) {
    if (!(half_width > 0.0) || !(du > 0.0)) throw BadWeight("window and step must be positive");
    const auto count = static_cast<Eigen::Index>(std::ceil(2.0 * half_width / du));
    UGrid grid;
    grid.du = 2.0 * half_width / static_cast<double>(count);
    grid.points.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) {
        grid.points(i) = -half_width + (static_cast<double>(i) + 0.5) * grid.du;
    }
    grid.weights = RealVector::Constant(count, 1.0 / (2.0 * half_width));
    return grid;
}

UGrid UGrid::gaussian(double tau, double du, double n_sigma) {
    if (!(tau > 0.0) || !(du > 0.0) || !(n_sigma > 0.0)) {
        throw BadWeight("tau, step and window must be positive");
    }
    UGrid grid = uniform_window(n_sigma * tau, du);
    for (Eigen::Index i = 0; i < grid.points.size(); ++i) {
        const double u = grid.points(i);
        grid.weights(i) = std::exp(-0.5 * u * u / (tau * tau));
    }
    grid.weights /= grid.weights.sum() * grid.du;
    return grid;
}

void UGrid::validate() const {
    if (points.size() == 0 || points.size() != weights.size() || !(du > 0.0)) {
        throw BadWeight("u-grid is empty or inconsistent");
    }
    if (weights.minCoeff() < 0.0) throw BadWeight("u-grid weights must be nonnegative");
    if (std::abs(weights.sum() * du - 1.0) > 1e-9) {
        throw BadWeight("u-grid weights do not sum to one against du");
    }
}

Complex scalar_mean(const std::function<Complex(double)> &f, const UGrid &grid) {
    grid.validate();
    Complex acc = 0.0;
    for (Eigen::Index i = 0; i < grid.points.size(); ++i) {
        acc += f(grid.points(i)) * grid.weights(i);
    }
    return acc * grid.du;
}

}  // namespace qmp
