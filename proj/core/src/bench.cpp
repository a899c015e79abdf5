#include "eqsat/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
// bivariate_statistics.hpp uses unqualified sqrt; <cmath> must come first
#include <boost/math/statistics/bivariate_statistics.hpp>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "eqsat/domains/lambda.hpp"
#include "eqsat/domains/math.hpp"
#include "eqsat/extract.hpp"
#include "eqsat/isomorphism.hpp"
#include "eqsat/runner.hpp"

namespace eqsat {

std::string to_string(RebuildStrategy s) { return s == RebuildStrategy::Immediate ? "immediate" : "deferred"; }

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

template <class A>
void attach_graph(WorkloadOutcome &out, EGraph<A> graph, const std::vector<EClassId> &roots) {
  Extractor<A, AstSize> ex(graph);
  for (auto r : roots) out.extracted.push_back(print_term(ex.term(r)));
  auto shared = std::make_shared<const EGraph<A>>(std::move(graph));
  out.graph = shared;
  out.same_partition = [shared](const WorkloadOutcome &other, std::string *why) {
    const auto *theirs = std::any_cast<std::shared_ptr<const EGraph<A>>>(&other.graph);
    if (!theirs) {
      if (why) *why = "graphs of different analyses";
      return false;
    }
    return eqsat::same_partition(*shared, **theirs, why);
  };
}

template <class A>
WorkloadOutcome run_saturation(const std::string &name, const LanguageDef &lang, const std::vector<std::string> &terms,
                               const std::vector<Rewrite<A>> &rules, size_t iters, RebuildStrategy strategy) {
  RunnerConfig cfg;
  cfg.iter_limit = iters;
  cfg.node_limit = 1'000'000;
  cfg.time_limit = std::chrono::milliseconds(600'000);
  cfg.scheduler = SchedulerKind::EveryRule;
  cfg.strategy = strategy;

  const auto start = Clock::now();
  EGraph<A> g;
  g.set_strategy(strategy);
  Runner<A> runner(cfg);
  runner.with_egraph(std::move(g));
  for (const auto &t : terms) runner.add_root(parse_term(t, lang));
  runner.run(rules);
  const auto end = Clock::now();

  WorkloadOutcome out;
  auto &rec = out.record;
  rec.workload = name;
  rec.strategy = strategy;
  rec.iters = runner.iterations().size();
  rec.total_ms = ms_between(start, end);
  uint64_t cumulative = 0;
  double congruence = 0;
  for (const auto &it : runner.iterations()) {
    cumulative += it.applied;
    congruence += it.congruence_ms();
    rec.series.emplace_back(cumulative, congruence);
  }
  rec.rewrites = cumulative;
  rec.congruence_ms = congruence;
  const auto &eg = runner.egraph();
  rec.repairs = eg.stats().repairs;
  rec.hashcons_updates = eg.stats().hashcons_updates;
  rec.enodes = eg.num_nodes();
  rec.eclasses = eg.num_classes();
  attach_graph(out, eg, runner.roots());
  return out;
}

WorkloadOutcome finish_synthetic(const std::string &name, RebuildStrategy strategy, EGraph<> &g,
                                 const std::vector<EClassId> &roots, uint64_t merges, Clock::time_point start,
                                 Clock::time_point t0, Clock::time_point t1) {
  WorkloadOutcome out;
  auto &rec = out.record;
  rec.workload = name;
  rec.strategy = strategy;
  rec.iters = 1;
  rec.rewrites = merges;
  rec.repairs = g.stats().repairs;
  rec.hashcons_updates = g.stats().hashcons_updates;
  rec.congruence_ms = ms_between(t0, t1);
  rec.total_ms = ms_between(start, Clock::now());
  rec.enodes = g.num_nodes();
  rec.eclasses = g.num_classes();
  rec.series.emplace_back(merges, rec.congruence_ms);
  attach_graph(out, std::move(g), roots);
  return out;
}

}  // namespace

Workload hashcons_workload(size_t n) {
  std::string name = "hashcons_n" + std::to_string(n);
  return {name, [n, name](RebuildStrategy strategy) {
            const auto start = Clock::now();
            EGraph<> g;
            g.set_strategy(strategy);
            EClassId x = g.add_leaf(Op::symbol("x"));
            std::vector<EClassId> roots;
            std::vector<EClassId> ys;
            for (size_t i = 1; i <= n; ++i) roots.push_back(g.add(ENode(Op::op("f" + std::to_string(i)), {x})));
            for (size_t i = 1; i <= n; ++i) ys.push_back(g.add_leaf(Op::symbol("y" + std::to_string(i))));
            g.reset_stats();
            const auto t0 = Clock::now();
            for (auto y : ys) g.merge(x, y);
            g.rebuild();
            const auto t1 = Clock::now();
            roots.push_back(x);
            return finish_synthetic(name, strategy, g, roots, n, start, t0, t1);
          }};
}

Workload width_depth_workload(size_t w, size_t d) {
  std::string name = "width_depth_w" + std::to_string(w) + "_d" + std::to_string(d);
  return {name, [w, d, name](RebuildStrategy strategy) {
            const auto start = Clock::now();
            EGraph<> g;
            g.set_strategy(strategy);
            std::vector<EClassId> xs;
            std::vector<EClassId> roots;
            for (size_t i = 1; i <= w; ++i) {
              EClassId cur = g.add_leaf(Op::symbol("x" + std::to_string(i)));
              xs.push_back(cur);
              for (size_t k = d; k >= 1; --k) cur = g.add(ENode(Op::op("f" + std::to_string(k)), {cur}));
              roots.push_back(cur);
            }
            g.reset_stats();
            const auto t0 = Clock::now();
            for (size_t i = 1; i < w; ++i) g.merge(xs[0], xs[i]);
            g.rebuild();
            const auto t1 = Clock::now();
            return finish_synthetic(name, strategy, g, roots, w - 1, start, t0, t1);
          }};
}

Workload math_workload(std::string name, std::vector<std::string> terms, size_t iters) {
  return {name, [name, terms = std::move(terms), iters](RebuildStrategy strategy) {
            return run_saturation<MathAnalysis>(name, math_language(), terms, math_rules(), iters, strategy);
          }};
}

Workload lambda_workload(std::string name, std::vector<std::string> terms, size_t iters) {
  return {name, [name, terms = std::move(terms), iters](RebuildStrategy strategy) {
            return run_saturation<LambdaAnalysis>(name, lambda_language(), terms, lambda_rules(), iters, strategy);
          }};
}

std::vector<Workload> default_corpus() {
  std::vector<Workload> out;
  for (size_t w : {10, 50, 100}) out.push_back(width_depth_workload(w, 10));
  for (size_t n : {100, 300, 1000}) out.push_back(hashcons_workload(n));
  out.push_back(math_workload("math_fig1", {"(/ (* a 2) 2)"}, 9));
  out.push_back(math_workload("math_fold", {"(+ (* 3 (+ 1 2)) (- 10 (* 2 2)))", "(* (+ x 0) (+ 4 -3))"}, 5));
  out.push_back(math_workload("math_sum4", {"(+ a (+ b (+ c d)))"}, 6));
  out.push_back(math_workload("math_poly", {"(* (+ x 1) (+ x 2))", "(- (* x (+ y 3)) (* 3 x))"}, 7));
  out.push_back(math_workload("math_batch",
                              {"(/ (* (+ a b) 2) 2)", "(+ (* x 2) (* x 3))", "(- (+ a b) b)", "(* (* p 1) (+ q 0))",
                               "(<< (+ m n) 1)"},
                              6));
  out.push_back(math_workload("math_dist", {"(* (+ a b) (+ c d))"}, 6));
  out.push_back(math_workload("math_shift", {"(+ (<< (* a 2) 1) (* (/ b 1) 4))", "(- (* 2 (+ a 0)) (<< a 1))"}, 5));
  out.push_back(lambda_workload("lambda_under", {"(lam x (+ 4 (app (lam y (var y)) 4)))"}, 12));
  out.push_back(lambda_workload("lambda_if_elim", {"(if (= (var a) (var b)) (+ (var a) (var a)) (+ (var a) (var b)))"}, 12));
  out.push_back(lambda_workload(
      "lambda_compose",
      {"(let compose (lam f (lam g (lam x (app (var f) (app (var g) (var x)))))) (let add1 (lam y (+ (var y) 1))"
       " (app (app (var compose) (var add1)) (app (app (var compose) (var add1)) (var add1)))))"},
      12));
  out.push_back(lambda_workload("lambda_let_chain",
                                {"(let a 1 (let b (+ (var a) 2) (let c (+ (var b) (var a)) (+ (var c) (var b)))))"},
                                12));
  return out;
}

BenchResult run_bench(const std::vector<Workload> &workloads, const BenchOptions &opts) {
  if (opts.repetitions == 0) throw std::invalid_argument("repetitions must be positive");
  BenchResult result;
  for (const auto &w : workloads) {
    std::vector<WorkloadOutcome> firsts;
    for (auto strategy : {RebuildStrategy::Immediate, RebuildStrategy::Deferred}) {
      std::vector<WorkloadOutcome> runs;
      for (size_t r = 0; r < opts.repetitions; ++r) runs.push_back(w.run(strategy));
      const auto &base = runs.front().record;
      for (const auto &run : runs) {
        const auto &rec = run.record;
        if (rec.repairs != base.repairs || rec.rewrites != base.rewrites || rec.enodes != base.enodes ||
            rec.eclasses != base.eclasses || rec.iters != base.iters) {
          throw std::runtime_error("workload " + w.name + " is not deterministic under " + to_string(strategy));
        }
      }
      std::vector<size_t> idx(runs.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::sort(idx.begin(), idx.end(), [&](size_t a, size_t b) {
        return runs[a].record.congruence_ms < runs[b].record.congruence_ms;
      });
      BenchRecord median = runs[idx[idx.size() / 2]].record;
      std::vector<double> totals;
      for (const auto &run : runs) totals.push_back(run.record.total_ms);
      std::nth_element(totals.begin(), totals.begin() + totals.size() / 2, totals.end());
      median.total_ms = totals[totals.size() / 2];
      result.records.push_back(std::move(median));
      firsts.push_back(std::move(runs.front()));
    }
    std::string why;
    if (!firsts[0].same_partition(firsts[1], &why)) {
      result.mismatches.push_back(w.name + ": partitions differ: " + why);
    } else if (firsts[0].extracted != firsts[1].extracted) {
      result.mismatches.push_back(w.name + ": extracted terms differ");
    }
  }
  if (opts.verify && !result.mismatches.empty()) throw std::runtime_error(result.mismatches.front());
  return result;
}

double spearman(const std::vector<double> &x, const std::vector<double> &y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("spearman needs two equal-length samples");
  auto ranks = [](const std::vector<double> &v) {
    std::vector<size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (size_t i = 0; i < order.size();) {
      size_t j = i;
      while (j < order.size() && v[order[j]] == v[order[i]]) ++j;
      double avg = (static_cast<double>(i) + static_cast<double>(j - 1)) / 2.0 + 1.0;
      for (size_t k = i; k < j; ++k) r[order[k]] = avg;
      i = j;
    }
    return r;
  };
  return boost::math::statistics::correlation_coefficient(ranks(x), ranks(y));
}

SpeedupReport speedup_report(const std::vector<BenchRecord> &records) {
  SpeedupReport rep;
  double log_sum = 0;
  for (size_t i = 0; i < records.size(); ++i) {
    const auto &imm = records[i];
    if (imm.strategy != RebuildStrategy::Immediate) continue;
    auto it = std::find_if(records.begin(), records.end(), [&](const BenchRecord &r) {
      return r.workload == imm.workload && r.strategy == RebuildStrategy::Deferred;
    });
    if (it == records.end()) continue;
    const auto &def = *it;
    SpeedupReport::Entry e;
    e.workload = imm.workload;
    e.speedup = imm.congruence_ms / std::max(def.congruence_ms, 1e-6);
    e.repairs_immediate = imm.repairs;
    e.repairs_deferred = def.repairs;
    for (size_t k = 0; k < std::min(imm.series.size(), def.series.size()); ++k) {
      e.series.emplace_back(def.series[k].first, imm.series[k].second / std::max(def.series[k].second, 1e-6));
    }
    log_sum += std::log(e.speedup);
    rep.entries.push_back(std::move(e));
  }
  if (!rep.entries.empty()) rep.geomean_speedup = std::exp(log_sum / static_cast<double>(rep.entries.size()));
  if (records.size() >= 2) {
    std::vector<double> repairs;
    std::vector<double> times;
    for (const auto &r : records) {
      repairs.push_back(static_cast<double>(r.repairs));
      times.push_back(r.congruence_ms);
    }
    rep.repair_time_spearman = spearman(repairs, times);
  }
  return rep;
}

void write_csv(std::ostream &os, const std::vector<BenchRecord> &records) {
  os << "workload,strategy,iters,rewrites,repairs,congruence_ms,total_ms,enodes,eclasses\n";
  for (const auto &r : records) {
    os << r.workload << ',' << to_string(r.strategy) << ',' << r.iters << ',' << r.rewrites << ',' << r.repairs << ','
       << r.congruence_ms << ',' << r.total_ms << ',' << r.enodes << ',' << r.eclasses << '\n';
  }
}

void write_json_lines(std::ostream &os, const std::vector<BenchRecord> &records) {
  for (const auto &r : records) {
    nlohmann::ordered_json j;
    j["workload"] = r.workload;
    j["strategy"] = to_string(r.strategy);
    j["iters"] = r.iters;
    j["rewrites"] = r.rewrites;
    j["repairs"] = r.repairs;
    j["hashcons_updates"] = r.hashcons_updates;
    j["congruence_ms"] = r.congruence_ms;
    j["total_ms"] = r.total_ms;
    j["enodes"] = r.enodes;
    j["eclasses"] = r.eclasses;
    os << j.dump() << '\n';
  }
}

std::string to_json(const SpeedupReport &r, int indent) {
  nlohmann::ordered_json j;
  j["geomean_speedup"] = r.geomean_speedup;
  j["repair_time_spearman"] = r.repair_time_spearman;
  auto entries = nlohmann::ordered_json::array();
  for (const auto &e : r.entries) {
    auto series = nlohmann::ordered_json::array();
    for (const auto &[rw, s] : e.series) series.push_back({{"cumulative_rewrites", rw}, {"speedup", s}});
    entries.push_back({{"workload", e.workload},
                       {"speedup", e.speedup},
                       {"repairs_immediate", e.repairs_immediate},
                       {"repairs_deferred", e.repairs_deferred},
                       {"series", std::move(series)}});
  }
  j["workloads"] = std::move(entries);
  return j.dump(indent);
}

std::vector<std::pair<Term, Term>> batch_identity_corpus(size_t n) {
  // every identity carries the same associative/commutative block, so a
  // shared e-graph explores it once
  const std::string shared = "(* (+ p (+ q r)) (+ s (+ t 3)))";
  std::vector<std::pair<Term, Term>> out;
  for (size_t i = 0; i < n; ++i) {
    std::string x = "x" + std::to_string(i);
    std::string lhs = "(+ (* (* " + x + " 1) 2) " + shared + ")";
    std::string rhs = "(+ " + shared + " (<< " + x + " 1))";
    out.emplace_back(parse_term(lhs, math_language()), parse_term(rhs, math_language()));
  }
  return out;
}

}  // namespace eqsat
