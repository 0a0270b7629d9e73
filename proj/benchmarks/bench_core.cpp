// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <random>

#include "qbm/kernels.hpp"
#include "qbm/mixture.hpp"
#include "qbm/phasespace.hpp"
#include "qbm/qsd.hpp"
#include "qbm/reconstruction.hpp"

using namespace qbm;

namespace {
const DerivedScales unit = derive_scales({1, 1, 1, 1});
const GaussianState cat = cat_state(4.0, 1.0, 1.0);
}  // namespace

static void BM_JExponent(benchmark::State& state) {
  const JKernel k = make_j_kernel(1.0, unit);
  double x = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(j_exponent(k, x, -x, 0.3, 0.2));
    x += 1e-9;
  }
}
BENCHMARK(BM_JExponent);

static void BM_EvolveExact(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(evolve_exact(cat, 1.0, unit));
}
BENCHMARK(BM_EvolveExact);

// grid propagation of a sampled density, O(n^2) per output row pair
static void BM_EvolveDensity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityGrid rho0 = sample(cat, centered_axis(0.0, 10.0, n), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(evolve_density(rho0, 1.0, unit));
}
BENCHMARK(BM_EvolveDensity)->Arg(64)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_WignerTransform(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const DensityGrid rho = sample(evolve_exact(cat, 1.0, unit), centered_axis(0.0, 10.0, n));
  for (auto _ : state) benchmark::DoNotOptimize(wigner_transform(rho, 1.0));
}
BENCHMARK(BM_WignerTransform)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_HusimiFromWigner(benchmark::State& state) {
  const auto w = sample(wigner_mixture(density_from_state(cat, 1.0), 1.0), Axis{-6, 6, 241}, Axis{-8, 8, 241});
  for (auto _ : state) benchmark::DoNotOptimize(husimi_from_wigner(w, 1.0, 1.0));
}
BENCHMARK(BM_HusimiFromWigner)->Unit(benchmark::kMillisecond);

static void BM_QsdStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  TrajectoryState s = initial_state(cat, centered_axis(0.0, 12.0, n), 1.0, 1);
  std::mt19937_64 rng(1);
  for (auto _ : state) {
    s = qsd_step(s, 1e-3, unit, rng);
    // hold the state near t = 0 so the packet never reaches the edge
    if (s.t > 0.5) s = initial_state(cat, s.x, 1.0, 1);
  }
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_QsdStep)->Arg(256)->Arg(512);

static void BM_FDistribution(benchmark::State& state) {
  const double t = 5.0;
  const PhaseBox box = phase_box(state_moments(cat, t, unit), 121, 121, 6.0);
  for (auto _ : state) benchmark::DoNotOptimize(f_distribution(cat, box.p, box.q, t, unit, Frame{}, 0));
}
BENCHMARK(BM_FDistribution)->Unit(benchmark::kMillisecond);

static void BM_Reconstruct(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(reconstruct(cat, 5.0, unit));
}
BENCHMARK(BM_Reconstruct)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
