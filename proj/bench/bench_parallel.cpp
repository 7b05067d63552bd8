// Serial reference against the OpenMP kernels on the three heavy sweeps.

#include <benchmark/benchmark.h>

#include <cmath>

#include "bvtk/compactness.hpp"
#include "bvtk/harness.hpp"
#include "bvtk/operator.hpp"

using namespace bvtk;

namespace {

Execution mode(const benchmark::State& state) { return state.range(0) == 0 ? Execution::serial : Execution::parallel; }

Kernel smooth_kernel() {
  const auto g = Grid::uniform(64);
  return Kernel::separable(SampledFunction::sample(g, [](double t) { return std::cos(2 * t); }),
                           SampledFunction::sample(g, [](double s) { return 1 + s; }));
}

void BM_apply_K(benchmark::State& state) {
  harness::Random rng(1);
  const auto grid = Grid::uniform(static_cast<std::size_t>(state.range(1)));
  const auto x = harness::random_function(rng, harness::random_grid(rng, 200));
  const auto k = smooth_kernel();
  for (auto _ : state) benchmark::DoNotOptimize(apply_K(k, x, grid, Extension::left_value, mode(state)));
}

void BM_mu_star(benchmark::State& state) {
  const auto grid = Grid::uniform(static_cast<std::size_t>(state.range(1)));
  DiagnosticOptions o;
  o.exec = mode(state);
  const auto seq = YoungSequence::wiener(2);
  for (auto _ : state) benchmark::DoNotOptimize(mu_star(Kernel::volterra(), seq, grid, grid, o));
}

void BM_equinorm(benchmark::State& state) {
  harness::Random rng(2);
  const auto grid = Grid::uniform(16);
  std::vector<SampledFunction> A;
  for (long i = 0; i < state.range(1); ++i) A.push_back(harness::random_function(rng, grid));
  EquinormOptions o;
  o.exec = mode(state);
  o.max_family = 4;
  const auto pool = dyadic_pool(grid, 3);
  for (auto _ : state) benchmark::DoNotOptimize(equinormed_search(A, YoungSequence::jordan(), 0.1, pool, o));
}

}  // namespace

BENCHMARK(BM_apply_K)->ArgsProduct({{0, 1}, {256, 2048}});
BENCHMARK(BM_mu_star)->ArgsProduct({{0, 1}, {16, 32}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_equinorm)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
