#pragma once

// Dirac-approximating apparatus preparations. The invariant mean is modelled
// by the shape of the momentum distribution of the preparation; three shapes
// make "different means" concrete:
//   gaussian       momentum density ~ exp(-2 s^2 p^2)   (std 1/(2s))
//   uniform_window momentum density flat on |p| <= 1/(2s)
//   two_sided_exp  momentum density ~ exp(-2 s |p|)
// In every case the position distribution concentrates at 0 as s -> 0, so the
// family realizes the point-position / mean-momentum pair of conditions as a
// limit of normal states.

#include <string>
#include <vector>

#include "qmp/lattice.hpp"

namespace qmp {

enum class MomentumShape { kGaussian, kUniformWindow, kTwoSidedExp };

MomentumShape parse_momentum_shape(const std::string &name);
std::string momentum_shape_name(MomentumShape shape);

struct ApparatusPreparation {
    WaveFunction wavefunction;
    double position_width = 0.0;  // family scale s
    MomentumShape shape = MomentumShape::kGaussian;
    RealVector momentum_density;  // over the momentum grid, sums to 1 against dp

    static ApparatusPreparation make(const Lattice &lat, MomentumShape shape, double s);
};

std::vector<ApparatusPreparation> dirac_family(const Lattice &lat, MomentumShape shape,
                                               const std::vector<double> &s_list);

}  // namespace qmp
