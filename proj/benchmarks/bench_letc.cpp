#include "letc/letc.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

using namespace letc;

Tensor3 gaussian(std::size_t n1, std::size_t n2, std::size_t n3, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Tensor3 t(n1, n2, n3);
  for (std::size_t q = 0; q < t.size(); ++q) t.data()[q] = g(rng);
  return t;
}

LinearTransform day_transform(std::size_t days) {
  return tgft_transform(build_temporal_adjacency(days, 7, 1.0, 1.0));
}

// Exact vs randomized thresholding on an I x J x K tensor; arg = J.
void BM_ExactSvt(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  const Tensor3 m = gaussian(48, j, 14, 1);
  const LinearTransform t = day_transform(14);
  for (auto _ : state) benchmark::DoNotOptimize(t_svt(m, t, 1.0));
}
BENCHMARK(BM_ExactSvt)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_RandomizedSvt(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  const Tensor3 m = gaussian(48, j, 14, 1);
  const LinearTransform t = day_transform(14);
  std::mt19937_64 rng(2);
  const SketchParams sketch{10, 1, 10};
  for (auto _ : state) benchmark::DoNotOptimize(randomized_t_svt(m, t, 1.0, sketch, rng));
}
BENCHMARK(BM_RandomizedSvt)->Arg(100)->Arg(200)->Arg(400)->Unit(benchmark::kMillisecond);

// Three Krylov steps of the Z-update on the synthetic graph; arg = J.
void BM_ZUpdate(benchmark::State& state) {
  const auto j = static_cast<std::size_t>(state.range(0));
  const SyntheticData data = generate_synthetic(j, 48, 14, 7, 1.0, 1);
  SolverConfig cfg;
  cfg.intervals_per_day = 48;
  const LetcOperators ops = build_operators(48, 14, build_spatial_graph(data.dataset), cfg);
  const ZSystem sys(ops, cfg.lambda_spatial, cfg.lambda_temporal);
  const Tensor3 x = gaussian(48, j, 14, 3);
  const Tensor3 y = gaussian(48, j, 14, 4);
  const Matrix z0 = matricize(gaussian(48, j, 14, 5));
  for (auto _ : state) benchmark::DoNotOptimize(z_update_cg(z0, x, y, 1.0, sys, cfg.cg_iters));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ZUpdate)->RangeMultiplier(2)->Range(50, 800)->Unit(benchmark::kMillisecond)->Complexity();

void BM_Solve(benchmark::State& state) {
  const SyntheticData data = generate_synthetic(100, 48, 14, 7, 1.0, 1);
  const SpatialGraph graph = build_spatial_graph(data.dataset);
  const ScenarioResult sc = apply_scenario(data.dataset, MaskScenario{0.3, 0.2, 0.2, 1});
  SolverConfig cfg;
  cfg.intervals_per_day = 48;
  for (auto _ : state) benchmark::DoNotOptimize(solve(sc.observations, graph, cfg));
}
BENCHMARK(BM_Solve)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
