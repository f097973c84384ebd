#include <benchmark/benchmark.h>

#include "gospace/catalog.hpp"

namespace {

using namespace gospace;

const RowInstance& instance(const std::string& row, const RowParams& params) {
  static std::map<std::string, RowInstance> cache;
  const std::string key = row_space_id(table1_row(row), params);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, instantiate(table1_row(row), params, 1)).first;
  return it->second;
}

const RowInstance& by_index(int i) {
  switch (i) {
    case 0: return instance("8", {{"n", 1}});
    case 1: return instance("6_1", {{"n", 3}});
    case 2: return instance("10", {});
    default: return instance("3", {});
  }
}

MetricSpec table_metric(const RowInstance& inst) {
  return MetricSpec::from_subspaces(*inst.space, inst.blueprint.eigenspaces(), positive_alphas(inst, 1).front());
}

void BM_GoFeasible(benchmark::State& state) {
  const RowInstance& inst = by_index(static_cast<int>(state.range(0)));
  const GOSolver solver(*inst.space, table_metric(inst));
  Rng rng(3);
  const Vector x = rng.gaussian(static_cast<Eigen::Index>(inst.space->dim_m()));
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(x));
  state.SetLabel(inst.space->id());
}
BENCHMARK(BM_GoFeasible)->DenseRange(0, 3);

void BM_CheckGo(benchmark::State& state) {
  const RowInstance& inst = by_index(static_cast<int>(state.range(0)));
  const MetricSpec metric = table_metric(inst);
  for (auto _ : state) benchmark::DoNotOptimize(check_go(*inst.space, metric, 200, 5));
  state.SetLabel(inst.space->id());
}
BENCHMARK(BM_CheckGo)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const RowInstance& inst = by_index(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(decompose(*inst.space, 7));
  state.SetLabel(inst.space->id());
}
BENCHMARK(BM_Decompose)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_LinearGraphFit(benchmark::State& state) {
  const RowInstance& inst = by_index(static_cast<int>(state.range(0)));
  const MetricSpec metric = table_metric(inst);
  for (auto _ : state) benchmark::DoNotOptimize(linear_graph_fit(*inst.space, metric, 2));
  state.SetLabel(inst.space->id());
}
BENCHMARK(BM_LinearGraphFit)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
