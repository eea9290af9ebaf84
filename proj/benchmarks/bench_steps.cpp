#include <benchmark/benchmark.h>

#include "wbary/quantile1d.hpp"
#include "wbary/scatter_location.hpp"
#include "wbary/solver.hpp"

namespace {

using namespace wbary;

void BM_QuantileSgdStep(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto mu = quantile1d::from_gaussian(0, 1, m);
  const std::vector<QuantileGrid> batch{quantile1d::from_gaussian(1, 2, m)};
  for (auto _ : state) benchmark::DoNotOptimize(quantile1d::sgd_step(mu, batch, 0.1));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(m));
}
BENCHMARK(BM_QuantileSgdStep)->RangeMultiplier(10)->Range(1000, 100000);

void BM_QuantileW2(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  const auto a = quantile1d::from_gaussian(0, 1, m);
  const auto b = quantile1d::from_gaussian(1, 2, m);
  for (auto _ : state) benchmark::DoNotOptimize(quantile1d::w2(a, b));
}
BENCHMARK(BM_QuantileW2)->RangeMultiplier(10)->Range(1000, 100000);

std::vector<ScatterLocationMeasure> scatter_atoms(Eigen::Index q, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<ScatterLocationMeasure> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(Vector::Zero(q), scatter::random_spd(q, 100.0, rng));
  return out;
}

void BM_ScatterSgdStep(benchmark::State& state) {
  const auto q = static_cast<Eigen::Index>(state.range(0));
  const auto batch_size = static_cast<std::size_t>(state.range(1));
  const auto mu = scatter_atoms(q, 1, 1).front();
  const auto batch = scatter_atoms(q, batch_size, 2);
  for (auto _ : state) benchmark::DoNotOptimize(scatter::sgd_step(mu, batch, 0.1));
}
BENCHMARK(BM_ScatterSgdStep)->ArgsProduct({{2, 5, 10, 20}, {1, 16}});

void BM_ScatterW2(benchmark::State& state) {
  const auto q = static_cast<Eigen::Index>(state.range(0));
  const auto atoms = scatter_atoms(q, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(scatter::w2(atoms[0], atoms[1]));
}
BENCHMARK(BM_ScatterW2)->Arg(2)->Arg(5)->Arg(10)->Arg(20);

void BM_ScatterFixedPoint(benchmark::State& state) {
  const auto q = static_cast<Eigen::Index>(state.range(0));
  const auto pi = FiniteSupport<ScatterLocationMeasure>::uniform(scatter_atoms(q, 8, 4));
  for (auto _ : state) benchmark::DoNotOptimize(scatter::fixed_point_barycenter(pi));
}
BENCHMARK(BM_ScatterFixedPoint)->Arg(2)->Arg(5)->Arg(10);

void BM_SolverRun1d(benchmark::State& state) {
  const std::size_t m = 1000;
  const PopulationModel<QuantileGrid> pi(FiniteSupport<QuantileGrid>(
      {0.3, 0.7}, {quantile1d::from_gaussian(1, 1, m), quantile1d::from_gaussian(3, 1, m)}));
  SolverConfig cfg;
  cfg.max_steps = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg));
}
BENCHMARK(BM_SolverRun1d)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
