#include "qmp/preparation.hpp"

#include <cmath>

namespace qmp {

MomentumShape parse_momentum_shape(const std::string &name) {
    if (name == "gaussian") return MomentumShape::kGaussian;
    if (name == "uniform_window") return MomentumShape::kUniformWindow;
    if (name == "two_sided_exp") return MomentumShape::kTwoSidedExp;
    throw ConfigError("unknown momentum_shape '" + name + "'");
}

std::string momentum_shape_name(MomentumShape shape) {
    switch (shape) {
        case MomentumShape::kGaussian: return "gaussian";
        case MomentumShape::kUniformWindow: return "uniform_window";
        case MomentumShape::kTwoSidedExp: return "two_sided_exp";
    }
    return "?";
}

namespace {

// Packet built in momentum space from real nonnegative mode weights; the
// resulting position amplitudes are real and even up to rounding.
WaveFunction from_momentum_profile(const Lattice &lat, const RealVector &mode_amplitude) {
    Vector chat = mode_amplitude.cast<Complex>();
    const double norm = chat.norm();
    if (!(norm > 0.0)) throw SupportViolation("momentum profile has no support on the grid");
    chat /= norm;
    const Vector c = lat.idft(chat);
    return WaveFunction{lat, c / std::sqrt(lat.dq())};
}

}  // namespace

ApparatusPreparation ApparatusPreparation::make(const Lattice &lat, MomentumShape shape,
                                                double s) {
    if (!(s > 0.0)) throw SupportViolation("preparation width must be positive");
    ApparatusPreparation prep;
    prep.shape = shape;
    prep.position_width = s;

    switch (shape) {
        case MomentumShape::kGaussian: {
            prep.wavefunction = gaussian_packet(lat, 0.0, 0.0, s);
            break;
        }
        case MomentumShape::kUniformWindow: {
            // Flat momentum amplitudes on |p| <= 1/(2s); the window must fit
            // strictly inside the symmetric part of the band.
            const double half_width = 1.0 / (2.0 * s);
            const double band = lat.momentum(lat.n() - 1);  // largest positive momentum
            if (half_width > band) {
                throw SupportViolation("momentum window 1/(2s) exceeds the lattice band");
            }
            RealVector mode = RealVector::Zero(lat.n());
            for (int k = 0; k < lat.n(); ++k) {
                if (std::abs(lat.momentum(k)) <= half_width) mode(k) = 1.0;
            }
            prep.wavefunction = from_momentum_profile(lat, mode);
            break;
        }
        case MomentumShape::kTwoSidedExp: {
            // |amplitude|^2 ~ exp(-2 s |p|), i.e. Laplace momentum density of
            // scale 1/(2s).
            RealVector mode(lat.n());
            for (int k = 0; k < lat.n(); ++k) {
                mode(k) = std::exp(-s * std::abs(lat.momentum(k)));
            }
            mode(0) = 0.0;  // drop the unpaired -n/2 mode to keep the profile even
            prep.wavefunction = from_momentum_profile(lat, mode);
            break;
        }
    }

    prep.momentum_density = prep.wavefunction.momentum_density();
    if (std::abs(prep.wavefunction.position_mean()) > 5.0 * lat.dq()) {
        throw SupportViolation("preparation position mean is off-center");
    }
    return prep;
}

std::vector<ApparatusPreparation> dirac_family(const Lattice &lat, MomentumShape shape,
                                               const std::vector<double> &s_list) {
    std::vector<ApparatusPreparation> out;
    out.reserve(s_list.size());
    for (const double s : s_list) out.push_back(ApparatusPreparation::make(lat, shape, s));
    return out;
}

}  // namespace qmp
