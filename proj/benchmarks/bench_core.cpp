#include <benchmark/benchmark.h>

#include "qmp/lattice.hpp"
#include "qmp/mean_kernel.hpp"
#include "qmp/process.hpp"
#include "qmp/random.hpp"

using namespace qmp;

namespace {

void BM_SpectralDecompose(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    Rng rng(1);
    const Matrix m = random_hermitian(rng, d);
    for (auto _ : state) {
        benchmark::DoNotOptimize(HermitianObservable::decompose(m));
    }
}
BENCHMARK(BM_SpectralDecompose)->Arg(32)->Arg(64)->Arg(128);

void BM_ConditionalExpectation(benchmark::State &state) {
    const int d = static_cast<int>(state.range(0));
    Rng rng(2);
    const auto x = HermitianObservable::decompose(random_hermitian(rng, d));
    const Matrix a = random_matrix(rng, d);
    const auto kernel = MeanKernel::cesaro(10.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(conditional_expectation(x, a, kernel));
    }
}
BENCHMARK(BM_ConditionalExpectation)->Arg(32)->Arg(64)->Arg(128);

void BM_Dft(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto lat = Lattice::make(n, 64.0);
    Rng rng(3);
    Vector c(n);
    for (int i = 0; i < n; ++i) c(i) = Complex(normal_double(rng), normal_double(rng));
    c /= c.norm();
    for (auto _ : state) {
        benchmark::DoNotOptimize(lat.dft(c));
    }
}
BENCHMARK(BM_Dft)->Arg(256)->Arg(1024);

void BM_EvolvePure(benchmark::State &state) {
    const int n = static_cast<int>(state.range(0));
    const auto lat = Lattice::make(n, 64.0);
    RealVector spectrum(4);
    spectrum << -2 * lat.dq(), -lat.dq(), lat.dq(), 2 * lat.dq();
    Rng rng(4);
    const auto x = random_observable_with_spectrum(rng, spectrum);
    const auto proc = MeasurementProcess::make(
        x, lat, ApparatusPreparation::make(lat, MomentumShape::kGaussian, 0.6));
    const Vector psi = random_state_vector(rng, 4);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evolve_pure(proc, psi));
    }
}
BENCHMARK(BM_EvolvePure)->Arg(256)->Arg(1024);

void BM_SuccessiveJoint(benchmark::State &state) {
    const auto lat = Lattice::make(256, 64.0);
    RealVector spectrum(2);
    spectrum << -4 * lat.dq(), 4 * lat.dq();
    const auto x = HermitianObservable::from_eigensystem(Matrix::Identity(2, 2), spectrum);
    const auto proc = MeasurementProcess::make(
        x, lat, ApparatusPreparation::make(lat, MomentumShape::kGaussian, 0.4));
    Matrix sx(2, 2);
    sx << 0, 1, 1, 0;
    const auto y = HermitianObservable::decompose(sx);
    const auto rho = DensityState::pure((Vector(2) << 1, 1).finished());
    const Bins bins = Bins::uniform(lat, static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(successive_joint(proc, rho, y, bins));
    }
}
BENCHMARK(BM_SuccessiveJoint)->Arg(8)->Arg(64);

}  // namespace

BENCHMARK_MAIN();
