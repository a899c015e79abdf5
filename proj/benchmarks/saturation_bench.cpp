#include <benchmark/benchmark.h>

#include "eqsat/domains/lambda.hpp"
#include "eqsat/domains/math.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/runner.hpp"

namespace {

using namespace eqsat;

void BM_MathSaturation(benchmark::State &state) {
  RunnerConfig cfg;
  cfg.iter_limit = static_cast<size_t>(state.range(0));
  cfg.node_limit = 1'000'000;
  cfg.scheduler = SchedulerKind::EveryRule;
  auto rules = math_rules();
  auto term = parse_term("(* (+ x 1) (- (* y 2) (/ x 1)))", math_language());
  size_t nodes = 0;
  for (auto _ : state) {
    Runner<MathAnalysis> r(cfg);
    r.add_root(term);
    r.run(rules);
    nodes = r.egraph().num_nodes();
  }
  state.counters["enodes"] = static_cast<double>(nodes);
}
BENCHMARK(BM_MathSaturation)->DenseRange(2, 6, 2)->Unit(benchmark::kMillisecond);

void BM_LambdaComposeMany(benchmark::State &state) {
  auto term = parse_term(
      "(let compose (lam f (lam g (lam x (app (var f) (app (var g) (var x))))))"
      " (let add1 (lam y (+ (var y) 1))"
      "  (app (app (var compose) (var add1))"
      "   (app (app (var compose) (var add1))"
      "    (app (app (var compose) (var add1))"
      "     (app (app (var compose) (var add1))"
      "      (var add1)))))))",
      lambda_language());
  auto rules = lambda_rules();
  for (auto _ : state) {
    Runner<LambdaAnalysis> r;
    r.add_root(term);
    r.run(rules);
    benchmark::DoNotOptimize(r.egraph().num_nodes());
  }
}
BENCHMARK(BM_LambdaComposeMany)->Unit(benchmark::kMillisecond);

void BM_EMatch(benchmark::State &state) {
  RunnerConfig cfg;
  cfg.iter_limit = 5;
  cfg.scheduler = SchedulerKind::EveryRule;
  Runner<MathAnalysis> r(cfg);
  r.add_root(parse_term("(+ a (+ b (+ c (+ d e))))", math_language()));
  r.run(math_rules());
  auto p = Pattern::parse("(+ ?a (+ ?b ?c))", math_language());
  size_t matches = 0;
  for (auto _ : state) {
    auto ms = ematch(r.egraph(), p);
    matches = total_matches<MathAnalysis>(ms);
    benchmark::DoNotOptimize(ms.data());
  }
  state.counters["matches"] = static_cast<double>(matches);
}
BENCHMARK(BM_EMatch)->Unit(benchmark::kMicrosecond);

void BM_Extract(benchmark::State &state) {
  RunnerConfig cfg;
  cfg.iter_limit = 5;
  cfg.scheduler = SchedulerKind::EveryRule;
  Runner<MathAnalysis> r(cfg);
  r.add_root(parse_term("(* (+ a b) (+ c (* d 2)))", math_language()));
  r.run(math_rules());
  for (auto _ : state) {
    auto best = extract_best(r.egraph(), r.roots()[0]);
    benchmark::DoNotOptimize(best.second);
  }
}
BENCHMARK(BM_Extract)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
