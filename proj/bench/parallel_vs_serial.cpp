#include <algorithm>
#include <numeric>
#include <vector>

#include <benchmark/benchmark.h>

#include "ikf/dcsis.hpp"
#include "ikf/forest.hpp"
#include "ikf/parallel.hpp"
#include "ikf/pvim.hpp"
#include "ikf/scenarios.hpp"

using namespace ikf;

namespace {

const Dataset& a1_data() {
  static const Dataset data = generate(Scenario::make(ScenarioId::A1, 200, 200), 1);
  return data;
}

GrowSpec king_spec(int depth) {
  const std::size_t p = a1_data().p();
  GrowSpec spec;
  spec.king = 0;
  spec.weights.assign(p, 1.0);
  spec.pool.resize(p);
  std::iota(spec.pool.begin(), spec.pool.end(), std::size_t{0});
  spec.max_depth = depth;
  return spec;
}

// Argument: OpenMP threads for the parallel variant, 0 for the serial reference.
void BM_BuildForest(benchmark::State& state) {
  const auto threads = static_cast<int>(state.range(0));
  const auto spec = king_spec(4);
  set_thread_count(threads);
  for (auto _ : state) {
    auto forest = threads == 0 ? serial::build_forest(a1_data(), spec, 100, SeedContext(2))
                               : build_forest(a1_data(), spec, 100, SeedContext(2));
    benchmark::DoNotOptimize(forest.trees.data());
  }
}

void BM_ForestPvims(benchmark::State& state) {
  const auto threads = static_cast<int>(state.range(0));
  set_thread_count(std::max(threads, 1));
  auto forest = build_forest(a1_data(), king_spec(4), 100, SeedContext(3));
  set_thread_count(threads);
  for (auto _ : state) {
    auto v = threads == 0 ? serial::forest_pvims(forest, a1_data(), {}, SeedContext(4))
                          : forest_pvims(forest, a1_data(), {}, SeedContext(4));
    benchmark::DoNotOptimize(v.data());
  }
}

void BM_DcSis(benchmark::State& state) {
  const auto threads = static_cast<int>(state.range(0));
  set_thread_count(threads);
  for (auto _ : state) {
    auto v = threads == 0 ? serial::dc_sis_scores(a1_data()) : dc_sis_scores(a1_data());
    benchmark::DoNotOptimize(v.data());
  }
}

void thread_args(benchmark::internal::Benchmark* b) {
  b->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_BuildForest)->Apply(thread_args);
BENCHMARK(BM_ForestPvims)->Apply(thread_args);
BENCHMARK(BM_DcSis)->Apply(thread_args);

BENCHMARK_MAIN();
