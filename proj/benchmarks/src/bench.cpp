#include <benchmark/benchmark.h>

#include <vector>

#include "cclust/density.hpp"
#include "cclust/kernel.hpp"
#include "cclust/linkage.hpp"
#include "cclust/rng.hpp"
#include "cclust/robust.hpp"
#include "cclust/simulate.hpp"

using namespace cclust;

namespace {

CounterfactualMatrix random_matrix(std::size_t n, int q, std::uint64_t seed) {
  Rng rng(seed);
  CounterfactualMatrix m;
  m.n = n;
  m.q = q;
  m.points.resize(n * static_cast<std::size_t>(q));
  for (double& v : m.points) v = rng.uniform();
  return m;
}

PointSet random_set(std::size_t n, int q, std::uint64_t seed) {
  Rng rng(seed);
  PointSet s(n, std::vector<double>(static_cast<std::size_t>(q)));
  for (auto& p : s)
    for (double& v : p) v = rng.uniform();
  return s;
}

}  // namespace

static void BM_AgglomerateAverage(benchmark::State& state) {
  auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 3, 11);
  for (auto _ : state) {
    auto d = agglomerate(m, LinkageKind::average);
    benchmark::DoNotOptimize(d);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AgglomerateAverage)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void BM_AgglomerateSingle(benchmark::State& state) {
  auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 3, 11);
  for (auto _ : state) {
    auto d = agglomerate(m, LinkageKind::single);
    benchmark::DoNotOptimize(d);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AgglomerateSingle)->RangeMultiplier(2)->Range(64, 512)->Complexity();

static void BM_KdeAtPoints(benchmark::State& state) {
  auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 2, 13);
  KernelSpec spec = make_triangular_kernel(2);
  for (auto _ : state) {
    auto dens = kde_at_points(m, 0.1, spec);
    benchmark::DoNotOptimize(dens);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KdeAtPoints)->RangeMultiplier(2)->Range(500, 4000)->Complexity();

static void BM_LevelSetCluster(benchmark::State& state) {
  auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 2, 17);
  KernelSpec spec = make_triangular_kernel(2);
  for (auto _ : state) {
    auto c = level_set_cluster(m, 0.1, 0.2, spec);
    benchmark::DoNotOptimize(c);
  }
}
BENCHMARK(BM_LevelSetCluster)->Arg(1000)->Arg(2000);

static void BM_Hausdorff(benchmark::State& state) {
  auto a = random_set(static_cast<std::size_t>(state.range(0)), 3, 19);
  auto b = random_set(static_cast<std::size_t>(state.range(0)), 3, 23);
  for (auto _ : state) {
    double d = hausdorff(a, b);
    benchmark::DoNotOptimize(d);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Hausdorff)->RangeMultiplier(2)->Range(250, 1000)->Complexity();

static void BM_RobustCluster(benchmark::State& state) {
  SimConfig sim;
  sim.n = static_cast<std::size_t>(state.range(0));
  sim.nu = 0.05;
  sim.seed = 3;
  auto [data, truth] = gen_voronoi(sim);
  GoodNeighborhoodParams params;
  params.nu = 0.05;
  for (auto _ : state) {
    auto out = robust_cluster(data, params, 10, 29);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_RobustCluster)->Arg(1000)->Arg(2500);

BENCHMARK_MAIN();
