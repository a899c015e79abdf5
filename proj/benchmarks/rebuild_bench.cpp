#include <benchmark/benchmark.h>

#include "eqsat/bench.hpp"

namespace {

using eqsat::RebuildStrategy;

// Range(0): width, range(1): 0 = immediate, 1 = deferred
void BM_WidthDepth(benchmark::State &state) {
  auto w = static_cast<size_t>(state.range(0));
  auto strategy = state.range(1) ? RebuildStrategy::Deferred : RebuildStrategy::Immediate;
  auto work = eqsat::width_depth_workload(w, 10);
  uint64_t repairs = 0;
  for (auto _ : state) {
    auto out = work.run(strategy);
    repairs = out.record.repairs;
    benchmark::DoNotOptimize(out.record.eclasses);
  }
  state.counters["repairs"] = static_cast<double>(repairs);
  state.SetLabel(eqsat::to_string(strategy));
}
BENCHMARK(BM_WidthDepth)->ArgsProduct({{10, 50, 100, 200}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_Hashcons(benchmark::State &state) {
  auto n = static_cast<size_t>(state.range(0));
  auto strategy = state.range(1) ? RebuildStrategy::Deferred : RebuildStrategy::Immediate;
  auto work = eqsat::hashcons_workload(n);
  uint64_t updates = 0;
  for (auto _ : state) {
    auto out = work.run(strategy);
    updates = out.record.hashcons_updates;
    benchmark::DoNotOptimize(out.record.enodes);
  }
  state.counters["hashcons_updates"] = static_cast<double>(updates);
  state.SetLabel(eqsat::to_string(strategy));
}
BENCHMARK(BM_Hashcons)->ArgsProduct({{100, 500, 2000}, {0, 1}})->Unit(benchmark::kMicrosecond);

}  // namespace
