#pragma once

#include <chrono>
#include <functional>
#include <future>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/pattern.hpp"
#include "eqsat/rewrite.hpp"

namespace eqsat {

enum class StopReason { Saturated, IterLimit, NodeLimit, TimeLimit, HookStop, AnalysisContradiction };

std::string to_string(StopReason r);

enum class SchedulerKind { EveryRule, Backoff };

/// Decides per iteration which rules are searched and which match sets are applied.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  /// False while the rule is banned; its matches are not collected.
  virtual bool can_search(size_t rule, size_t iter) = 0;
  /// Called with the match count of a searched rule; false drops the matches.
  virtual bool admit(size_t rule, size_t iter, size_t matches) = 0;
  /// True if some ban is still in force at or after `iter`.
  [[nodiscard]] virtual bool bans_pending(size_t iter) const = 0;
  /// Ends every ban early (used when nothing else can make progress).
  virtual void lift_bans(size_t iter) = 0;
};

class EveryRuleScheduler final : public Scheduler {
 public:
  bool can_search(size_t, size_t) override { return true; }
  bool admit(size_t, size_t, size_t) override { return true; }
  [[nodiscard]] bool bans_pending(size_t) const override { return false; }
  void lift_bans(size_t) override {}
};

struct BackoffConfig {
  size_t match_limit = 1000;
  size_t ban_length = 5;
};

/// Bans a rule whose match count exceeds its limit for
/// ban_length * 2^times_banned iterations and doubles the limit.
class BackoffScheduler final : public Scheduler {
 public:
  struct RuleState {
    size_t match_limit;
    size_t ban_until = 0;
    size_t times_banned = 0;
    bool banned_once = false;
  };

  explicit BackoffScheduler(BackoffConfig cfg = {}) : cfg_(cfg) {}

  bool can_search(size_t rule, size_t iter) override {
    const auto &s = state(rule);
    return !(s.banned_once && iter <= s.ban_until);
  }

  bool admit(size_t rule, size_t iter, size_t matches) override {
    auto &s = state(rule);
    if (matches <= s.match_limit) return true;
    s.ban_until = iter + cfg_.ban_length * (size_t{1} << s.times_banned);
    s.banned_once = true;
    ++s.times_banned;
    s.match_limit *= 2;
    return false;
  }

  [[nodiscard]] bool bans_pending(size_t iter) const override {
    for (const auto &s : states_) {
      if (s.banned_once && s.ban_until >= iter) return true;
    }
    return false;
  }

  void lift_bans(size_t iter) override {
    for (auto &s : states_) {
      if (s.banned_once && s.ban_until >= iter) s.ban_until = iter == 0 ? 0 : iter - 1;
    }
  }

  [[nodiscard]] const RuleState &rule_state(size_t rule) { return state(rule); }

 private:
  RuleState &state(size_t rule) {
    while (states_.size() <= rule) states_.push_back(RuleState{cfg_.match_limit});
    return states_[rule];
  }

  BackoffConfig cfg_;
  std::vector<RuleState> states_;
};

struct RunnerConfig {
  size_t iter_limit = 30;
  size_t node_limit = 10000;
  std::chrono::milliseconds time_limit{5000};
  SchedulerKind scheduler = SchedulerKind::Backoff;
  BackoffConfig backoff;
  RebuildStrategy strategy = RebuildStrategy::Deferred;
  /// Search rules on worker threads; results are merged in rule order.
  bool parallel_search = false;
};

std::unique_ptr<Scheduler> make_scheduler(const RunnerConfig &cfg);

struct RuleReport {
  std::string name;
  size_t matches = 0;
  size_t applied = 0;
  bool banned = false;
};

struct IterationReport {
  size_t index = 0;
  std::vector<RuleReport> rules;
  size_t enodes = 0;
  size_t eclasses = 0;
  double search_ms = 0;
  double apply_ms = 0;
  double rebuild_ms = 0;
  uint64_t repairs = 0;
  uint64_t rebuilds = 0;
  size_t applied = 0;
  std::optional<StopReason> stop_reason;

  [[nodiscard]] double congruence_ms() const { return apply_ms + rebuild_ms; }
};

/// One JSON object per line.
std::string to_json_line(const IterationReport &r);

/// Per-iteration callback, run before each iteration (including the first).
/// Returning false stops the run with StopReason::HookStop.
template <class A>
using RunnerHook = std::function<bool(const EGraph<A> &, std::span<const EClassId> roots, size_t iter)>;

/// Equality saturation over a set of roots with a read phase, a write phase
/// and a single rebuild per iteration.
template <class A>
class Runner {
 public:
  explicit Runner(RunnerConfig cfg = {}, A analysis = A{}) : cfg_(cfg), egraph_(std::move(analysis)) {}

  Runner &with_egraph(EGraph<A> g) {
    egraph_ = std::move(g);
    return *this;
  }
  Runner &with_scheduler(std::unique_ptr<Scheduler> s) {
    scheduler_ = std::move(s);
    return *this;
  }
  Runner &add_root(const Term &t) {
    roots_.push_back(egraph_.add_term(t));
    return *this;
  }
  Runner &add_hook(RunnerHook<A> h) {
    hooks_.push_back(std::move(h));
    return *this;
  }

  Runner &run(std::span<const Rewrite<A>> rules);
  Runner &run(const std::vector<Rewrite<A>> &rules) { return run(std::span<const Rewrite<A>>(rules)); }

  [[nodiscard]] EGraph<A> &egraph() { return egraph_; }
  [[nodiscard]] const EGraph<A> &egraph() const { return egraph_; }
  [[nodiscard]] const std::vector<EClassId> &roots() const { return roots_; }
  [[nodiscard]] const std::vector<IterationReport> &iterations() const { return iterations_; }
  [[nodiscard]] std::optional<StopReason> stop_reason() const { return stop_reason_; }
  [[nodiscard]] const std::string &diagnostic() const { return diagnostic_; }
  [[nodiscard]] const RunnerConfig &config() const { return cfg_; }

 private:
  using Clock = std::chrono::steady_clock;

  static double ms_since(Clock::time_point t) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t).count();
  }

  void stop(StopReason r) {
    stop_reason_ = r;
    if (!iterations_.empty() && !iterations_.back().stop_reason) iterations_.back().stop_reason = r;
  }

  RunnerConfig cfg_;
  EGraph<A> egraph_;
  std::unique_ptr<Scheduler> scheduler_;
  std::vector<EClassId> roots_;
  std::vector<RunnerHook<A>> hooks_;
  std::vector<IterationReport> iterations_;
  std::optional<StopReason> stop_reason_;
  std::string diagnostic_;
};

template <class A>
Runner<A> &Runner<A>::run(std::span<const Rewrite<A>> rules) {
  if (cfg_.iter_limit == 0 || cfg_.node_limit == 0 || cfg_.time_limit.count() <= 0) {
    throw std::invalid_argument("runner limits must be positive");
  }
  if (!scheduler_) scheduler_ = make_scheduler(cfg_);
  const auto start = Clock::now();
  egraph_.set_strategy(cfg_.strategy);
  try {
    egraph_.rebuild();
  } catch (const AnalysisContradiction &e) {
    diagnostic_ = e.what();
    stop(StopReason::AnalysisContradiction);
    return *this;
  }
  for (auto &r : roots_) r = egraph_.find(r);

  for (size_t iter = iterations_.size();; ++iter) {
    if (iter >= cfg_.iter_limit) {
      stop(StopReason::IterLimit);
      break;
    }
    bool keep_going = true;
    for (auto &h : hooks_) keep_going = keep_going && h(egraph_, roots_, iter);
    if (!keep_going) {
      stop(StopReason::HookStop);
      break;
    }
    if (egraph_.num_nodes() > cfg_.node_limit) {
      stop(StopReason::NodeLimit);
      break;
    }
    if (Clock::now() - start > cfg_.time_limit) {
      stop(StopReason::TimeLimit);
      break;
    }

    IterationReport report;
    report.index = iter;
    report.rules.resize(rules.size());
    const EGraphStats before = egraph_.stats();

    // read phase: every rule searches the same clean graph
    auto t = Clock::now();
    std::vector<std::vector<SearchMatches>> matches(rules.size());
    std::vector<bool> searched(rules.size(), false);
    for (size_t i = 0; i < rules.size(); ++i) {
      report.rules[i].name = rules[i].name();
      searched[i] = scheduler_->can_search(i, iter);
    }
    if (cfg_.parallel_search) {
      std::vector<std::future<std::vector<SearchMatches>>> futures(rules.size());
      for (size_t i = 0; i < rules.size(); ++i) {
        if (searched[i]) {
          futures[i] = std::async(std::launch::async, [&, i] { return rules[i].search(egraph_); });
        }
      }
      for (size_t i = 0; i < rules.size(); ++i) {
        if (searched[i]) matches[i] = futures[i].get();
      }
    } else {
      for (size_t i = 0; i < rules.size(); ++i) {
        if (searched[i]) matches[i] = rules[i].search(egraph_);
      }
    }
    for (size_t i = 0; i < rules.size(); ++i) {
      if (!searched[i]) {
        report.rules[i].banned = true;
        continue;
      }
      size_t n = total_matches<A>(matches[i]);
      report.rules[i].matches = n;
      if (!scheduler_->admit(i, iter, n)) {
        report.rules[i].banned = true;
        matches[i].clear();
      }
    }
    report.search_ms = ms_since(t);

    std::optional<StopReason> reason;
    if (Clock::now() - start > cfg_.time_limit) reason = StopReason::TimeLimit;

    // write phase
    t = Clock::now();
    if (!reason) {
      for (size_t i = 0; i < rules.size(); ++i) {
        try {
          report.rules[i].applied = rules[i].apply(egraph_, matches[i]);
        } catch (const AnalysisContradiction &e) {
          diagnostic_ = "rule " + rules[i].name() + ": " + e.what();
          reason = StopReason::AnalysisContradiction;
          break;
        } catch (const std::exception &e) {
          throw RewriteError("rule " + rules[i].name() + " failed in iteration " + std::to_string(iter) + ": " +
                             e.what());
        }
        report.applied += report.rules[i].applied;
        if (egraph_.num_nodes() > cfg_.node_limit) {
          reason = StopReason::NodeLimit;
          break;
        }
      }
    }
    report.apply_ms = ms_since(t);

    // restore the invariants once per iteration
    t = Clock::now();
    if (reason != StopReason::AnalysisContradiction) {
      try {
        egraph_.rebuild();
      } catch (const AnalysisContradiction &e) {
        diagnostic_ = e.what();
        reason = StopReason::AnalysisContradiction;
      }
    }
    report.rebuild_ms = ms_since(t);

    const EGraphStats &after = egraph_.stats();
    report.repairs = after.repairs - before.repairs;
    report.rebuilds = after.rebuilds - before.rebuilds;
    report.enodes = egraph_.num_nodes();
    report.eclasses = egraph_.num_classes();
    for (auto &r : roots_) r = egraph_.find(r);
    iterations_.push_back(std::move(report));

    if (reason) {
      stop(*reason);
      break;
    }
    bool changed = after.adds != before.adds || after.unions != before.unions;
    if (!changed) {
      if (!scheduler_->bans_pending(iter)) {
        stop(StopReason::Saturated);
        break;
      }
      // only banned rules can still make progress
      scheduler_->lift_bans(iter + 1);
    }
  }
  return *this;
}

/// Whether a pattern is represented in the root's class.
template <class A>
bool class_matches(const EGraph<A> &g, EClassId root, const Pattern &goal) {
  return !ematch_class(g, goal, root).empty();
}

struct EquivResult {
  bool equal = false;
  size_t iterations = 0;
  StopReason stop_reason = StopReason::Saturated;
  std::string diagnostic;
};

/// Adds both terms and saturates until they share a class or a limit hits.
/// `equal == false` means unknown, not disproved.
template <class A>
EquivResult check_equiv(const Term &lhs, const Term &rhs, std::span<const Rewrite<A>> rules, RunnerConfig cfg = {},
                        A analysis = A{}) {
  Runner<A> runner(cfg, std::move(analysis));
  runner.add_root(lhs).add_root(rhs);
  runner.add_hook([](const EGraph<A> &g, std::span<const EClassId> roots, size_t) {
    return g.find(roots[0]) != g.find(roots[1]);
  });
  runner.run(rules);
  const auto &g = runner.egraph();
  return EquivResult{g.find(runner.roots()[0]) == g.find(runner.roots()[1]), runner.iterations().size(),
                     *runner.stop_reason(), runner.diagnostic()};
}

struct BatchEquivResult {
  std::vector<bool> equal;
  size_t iterations = 0;
  StopReason stop_reason = StopReason::Saturated;
  std::string diagnostic;
};

/// Checks many pairs in one shared e-graph; stops once every pair is unified.
template <class A>
BatchEquivResult check_equiv_batch(std::span<const std::pair<Term, Term>> pairs, std::span<const Rewrite<A>> rules,
                                   RunnerConfig cfg = {}, A analysis = A{}) {
  Runner<A> runner(cfg, std::move(analysis));
  for (const auto &[l, r] : pairs) runner.add_root(l).add_root(r);
  runner.add_hook([](const EGraph<A> &g, std::span<const EClassId> roots, size_t) {
    for (size_t i = 0; i + 1 < roots.size(); i += 2) {
      if (g.find(roots[i]) != g.find(roots[i + 1])) return true;
    }
    return false;
  });
  runner.run(rules);
  BatchEquivResult out;
  const auto &g = runner.egraph();
  const auto &roots = runner.roots();
  for (size_t i = 0; i + 1 < roots.size(); i += 2) out.equal.push_back(g.find(roots[i]) == g.find(roots[i + 1]));
  out.iterations = runner.iterations().size();
  out.stop_reason = *runner.stop_reason();
  out.diagnostic = runner.diagnostic();
  return out;
}

}  // namespace eqsat
