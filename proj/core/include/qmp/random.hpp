#pragma once

// Seeded random instances for property tests and the harness. Gaussian
// deviates are produced by an explicit Box-Muller transform on raw mt19937_64
// words so that sequences are identical across standard libraries (reports
// must be byte-stable for a given seed).

#include <cstdint>
#include <random>

#include "qmp/linalg.hpp"

namespace qmp {

using Rng = std::mt19937_64;

// Uniform in [0, 1) from the top 53 bits.
double uniform_double(Rng &rng);

double normal_double(Rng &rng);

// Complex Gaussian matrix (no symmetry).
Matrix random_matrix(Rng &rng, int dim);

// GUE-style Hermitian matrix scaled to unit operator norm.
Matrix random_hermitian(Rng &rng, int dim);

// Haar-ish unitary via Gaussian matrix + Householder QR with phase-fixed R.
Matrix random_unitary(Rng &rng, int dim);

Vector random_state_vector(Rng &rng, int dim);

DensityState random_density(Rng &rng, int dim);

// V diag(spectrum) V^dagger with V seeded; spectrum need not be sorted.
HermitianObservable random_observable_with_spectrum(Rng &rng, const RealVector &spectrum,
                                                    double gap_tol = kDefaultGapTol);

}  // namespace qmp
