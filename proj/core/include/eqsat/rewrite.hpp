#pragma once

#include <algorithm>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/pattern.hpp"

namespace eqsat {

/// A rule (or rule application) failed for a reason other than an analysis contradiction.
class RewriteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Guard evaluated against a match before the applier runs.
///
/// Pure guards only read the graph and are checked during the read phase,
/// right after e-matching. Mutating guards (add-then-compare) run in the write
/// phase.
template <class A>
struct Condition {
  using PureFn = std::function<bool(const EGraph<A> &, EClassId, const Subst &)>;
  using MutFn = std::function<bool(EGraph<A> &, EClassId, const Subst &)>;

  std::string description;
  PureFn check;
  std::vector<Var> reads;
  MutFn check_mut;

  [[nodiscard]] bool mutates() const { return static_cast<bool>(check_mut); }
  bool operator()(EGraph<A> &g, EClassId id, const Subst &s) const { return mutates() ? check_mut(g, id, s) : check(g, id, s); }
};

template <class A>
Condition<A> not_same_var(Var a, Var b) {
  return {"not-same-var " + std::string(a.name.str()) + " " + std::string(b.name.str()),
          [a, b](const EGraph<A> &g, EClassId, const Subst &s) { return g.find(s[a]) != g.find(s[b]); },
          {a, b},
          {}};
}

template <ConstantAnalysis A>
Condition<A> is_const(Var v) {
  return {"is-const " + std::string(v.name.str()),
          [v](const EGraph<A> &g, EClassId, const Subst &s) { return A::constant_of(g[s[v]].data).has_value(); },
          {v},
          {}};
}

/// True when the class of `v` holds a known integer constant other than zero.
template <ConstantAnalysis A>
Condition<A> is_nonzero_const(Var v) {
  return {"is-nonzero " + std::string(v.name.str()),
          [v](const EGraph<A> &g, EClassId, const Subst &s) {
            auto c = A::constant_of(g[s[v]].data);
            if (!c) return false;
            if (const auto *i = std::get_if<int64_t>(&*c)) return *i != 0;
            return false;
          },
          {v},
          {}};
}

enum class EqualityCheck {
  /// Instantiate both sides with add, then compare classes (may grow the graph).
  AddThenCompare,
  /// Only look the instantiations up; an absent subterm makes the condition false.
  LookupOnly,
};

/// Holds when both patterns, instantiated under the match, land in one class.
template <class A>
Condition<A> condition_equal(Pattern lhs, Pattern rhs, EqualityCheck mode = EqualityCheck::AddThenCompare) {
  std::vector<Var> reads = lhs.vars();
  for (auto v : rhs.vars()) {
    if (std::find(reads.begin(), reads.end(), v) == reads.end()) reads.push_back(v);
  }
  Condition<A> c;
  c.description = "eq " + lhs.to_string() + " " + rhs.to_string();
  c.reads = std::move(reads);
  if (mode == EqualityCheck::LookupOnly) {
    c.check = [lhs = std::move(lhs), rhs = std::move(rhs)](const EGraph<A> &g, EClassId, const Subst &s) {
      auto a = lookup_pattern(g, lhs, s);
      auto b = lookup_pattern(g, rhs, s);
      return a && b && g.find(*a) == g.find(*b);
    };
  } else {
    c.check_mut = [lhs = std::move(lhs), rhs = std::move(rhs)](EGraph<A> &g, EClassId, const Subst &s) {
      auto a = apply_pattern(g, lhs, s);
      auto b = apply_pattern(g, rhs, s);
      return g.find(a) == g.find(b);
    };
  }
  return c;
}

/// Right-hand side of a rewrite: a pattern, a guarded applier, or a procedure.
template <class A>
class Applier {
 public:
  using DynamicFn = std::function<std::vector<EClassId>(EGraph<A> &, EClassId, const Subst &)>;
  /// Read-phase step of a procedure: may reject the match or add bindings.
  using PrepareFn = std::function<bool(const EGraph<A> &, EClassId, Subst &)>;

  static Applier pattern(Pattern p) { return Applier(PatternRhs{std::move(p)}); }

  static Applier conditional(Condition<A> cond, Applier inner) {
    return Applier(Guarded{std::move(cond), std::make_shared<const Applier>(std::move(inner))});
  }

  /// `reads` lists the searcher variables the procedure consumes. A `prepare`
  /// step runs with the pure guards, against the graph as it was searched.
  static Applier dynamic(std::string description, DynamicFn fn, std::vector<Var> reads, PrepareFn prepare = {}) {
    return Applier(Dynamic{std::move(description), std::move(fn), std::move(reads), std::move(prepare)});
  }

  /// Ids to be unified with the matched class; empty when a guard fails.
  /// With `pure_checked`, the read phase (pure guards and prepare steps) is
  /// assumed to have run on `subst` already.
  std::vector<EClassId> apply_one(EGraph<A> &g, EClassId eclass, const Subst &subst, bool pure_checked = false) const {
    if (const auto *p = std::get_if<PatternRhs>(&impl_)) return {apply_pattern(g, p->pattern, subst)};
    if (const auto *c = std::get_if<Guarded>(&impl_)) {
      if ((c->cond.mutates() || !pure_checked) && !c->cond(g, eclass, subst)) return {};
      return c->inner->apply_one(g, eclass, subst, pure_checked);
    }
    const auto &d = std::get<Dynamic>(impl_);
    if (pure_checked || !d.prepare) return d.fn(g, eclass, subst);
    Subst prepared = subst;
    if (!d.prepare(g, eclass, prepared)) return {};
    return d.fn(g, eclass, prepared);
  }

  /// Runs the read phase: pure guards (mutating guards count as true) and
  /// prepare steps. False rejects the match.
  [[nodiscard]] bool read_phase(const EGraph<A> &g, EClassId eclass, Subst &subst) const {
    if (std::holds_alternative<PatternRhs>(impl_)) return true;
    if (const auto *c = std::get_if<Guarded>(&impl_)) {
      if (!c->cond.mutates() && !c->cond.check(g, eclass, subst)) return false;
      return c->inner->read_phase(g, eclass, subst);
    }
    const auto &d = std::get<Dynamic>(impl_);
    return !d.prepare || d.prepare(g, eclass, subst);
  }

  /// Conjunction of the pure guards (mutating guards count as true).
  [[nodiscard]] bool pure_guards_hold(const EGraph<A> &g, EClassId eclass, const Subst &subst) const {
    const auto *c = std::get_if<Guarded>(&impl_);
    if (!c) return true;
    if (!c->cond.mutates() && !c->cond.check(g, eclass, subst)) return false;
    return c->inner->pure_guards_hold(g, eclass, subst);
  }

  [[nodiscard]] bool has_pure_guards() const {
    const auto *c = std::get_if<Guarded>(&impl_);
    return c && (!c->cond.mutates() || c->inner->has_pure_guards());
  }

  [[nodiscard]] bool has_read_phase() const {
    if (std::holds_alternative<PatternRhs>(impl_)) return false;
    if (const auto *c = std::get_if<Guarded>(&impl_)) return !c->cond.mutates() || c->inner->has_read_phase();
    return static_cast<bool>(std::get<Dynamic>(impl_).prepare);
  }

  /// Searcher variables this applier (and its guards) read.
  [[nodiscard]] std::vector<Var> reads() const {
    if (const auto *p = std::get_if<PatternRhs>(&impl_)) return p->pattern.vars();
    if (const auto *c = std::get_if<Guarded>(&impl_)) {
      auto out = c->inner->reads();
      out.insert(out.end(), c->cond.reads.begin(), c->cond.reads.end());
      return out;
    }
    return std::get<Dynamic>(impl_).reads;
  }

  [[nodiscard]] std::string to_string() const {
    if (const auto *p = std::get_if<PatternRhs>(&impl_)) return p->pattern.to_string();
    if (const auto *c = std::get_if<Guarded>(&impl_)) return c->inner->to_string() + " if " + c->cond.description;
    return std::get<Dynamic>(impl_).description;
  }

  [[nodiscard]] const Pattern *as_pattern() const {
    const auto *p = std::get_if<PatternRhs>(&impl_);
    return p ? &p->pattern : nullptr;
  }

 private:
  struct PatternRhs {
    Pattern pattern;
  };
  struct Guarded {
    Condition<A> cond;
    std::shared_ptr<const Applier> inner;
  };
  struct Dynamic {
    std::string description;
    DynamicFn fn;
    std::vector<Var> reads;
    PrepareFn prepare;
  };

  template <class T>
  explicit Applier(T impl) : impl_(std::move(impl)) {}

  std::variant<PatternRhs, Guarded, Dynamic> impl_;
};

/// Named rewrite: a searcher pattern and an applier.
template <class A>
class Rewrite {
 public:
  Rewrite(std::string name, Pattern searcher, Applier<A> applier)
      : name_(std::move(name)), searcher_(std::move(searcher)), applier_(std::move(applier)) {
    for (auto v : applier_.reads()) {
      if (!searcher_.mentions(v)) {
        throw std::invalid_argument("rewrite " + name_ + ": variable " + std::string(v.name.str()) +
                                    " is not bound by the left-hand side");
      }
    }
  }

  Rewrite(std::string name, Pattern searcher, Pattern rhs)
      : Rewrite(std::move(name), std::move(searcher), Applier<A>::pattern(std::move(rhs))) {}

  [[nodiscard]] const std::string &name() const { return name_; }
  [[nodiscard]] const Pattern &searcher() const { return searcher_; }
  [[nodiscard]] const Applier<A> &applier() const { return applier_; }

  /// E-matches the searcher and runs the applier's read phase on each
  /// substitution, dropping the rejected ones.
  [[nodiscard]] std::vector<SearchMatches> search(const EGraph<A> &g) const {
    auto found = ematch(g, searcher_);
    if (!applier_.has_read_phase()) return found;
    std::vector<SearchMatches> out;
    for (auto &m : found) {
      std::erase_if(m.substs, [&](Subst &s) { return !applier_.read_phase(g, m.eclass, s); });
      if (!m.substs.empty()) out.push_back(std::move(m));
    }
    return out;
  }

  /// Applies matches produced by search on the current graph; returns how
  /// many substitutions produced a new union.
  size_t apply(EGraph<A> &g, std::span<const SearchMatches> matches) const {
    size_t applied = 0;
    for (const auto &m : matches) {
      for (const auto &subst : m.substs) {
        bool productive = false;
        for (auto id : applier_.apply_one(g, m.eclass, subst, true)) {
          if (g.find(id) != g.find(m.eclass)) {
            g.merge(m.eclass, id);
            productive = true;
          }
        }
        applied += productive ? 1 : 0;
      }
    }
    return applied;
  }

  [[nodiscard]] std::string to_string() const {
    return name_ + ": " + searcher_.to_string() + " => " + applier_.to_string();
  }

 private:
  std::string name_;
  Pattern searcher_;
  Applier<A> applier_;
};

template <class A>
size_t total_matches(const std::vector<SearchMatches> &ms) {
  size_t n = 0;
  for (const auto &m : ms) n += m.substs.size();
  return n;
}

/// Analyses tracking an over-approximation of free variables per class.
template <class A>
concept FreeVarAnalysis = Analysis<A> && requires(const EGraph<A> &g, const typename A::Data &d, EClassId v) {
  { A::is_free(g, d, v) } -> std::same_as<bool>;
};

/// Capture-avoiding substitution under a binder.
///
/// Whether `v2` may occur free in `e` is decided in the read phase, so every
/// match in an iteration sees the same analysis data. In that case `fresh` is
/// bound to the matched class and a symbol named `_<class id>` is created
/// when applying `if_free`; otherwise `if_not_free` is applied.
struct CaptureAvoidSpec {
  Var fresh;
  Var v2;
  Var e;
  Pattern if_not_free;
  Pattern if_free;
};

template <FreeVarAnalysis A>
bool capture_avoid_prepare(const EGraph<A> &g, EClassId eclass, Subst &subst, const CaptureAvoidSpec &spec) {
  if (A::is_free(g, g[subst[spec.e]].data, subst[spec.v2])) subst.insert(spec.fresh, g.find(eclass));
  return true;
}

template <FreeVarAnalysis A>
std::vector<EClassId> capture_avoid_apply(EGraph<A> &g, EClassId, const Subst &subst, const CaptureAvoidSpec &spec) {
  auto named = subst.get(spec.fresh);
  if (!named) return {apply_pattern(g, spec.if_not_free, subst)};
  Subst extended = subst;
  extended.insert(spec.fresh, g.add(ENode(Op::symbol("_" + std::to_string(named->index())))));
  return {apply_pattern(g, spec.if_free, extended)};
}

template <FreeVarAnalysis A>
Applier<A> capture_avoid(CaptureAvoidSpec spec) {
  std::vector<Var> reads;
  for (const auto *p : {&spec.if_not_free, &spec.if_free}) {
    for (auto v : p->vars()) {
      if (v != spec.fresh && std::find(reads.begin(), reads.end(), v) == reads.end()) reads.push_back(v);
    }
  }
  std::string desc = "capture-avoid(" + spec.if_not_free.to_string() + " | " + spec.if_free.to_string() + ")";
  auto shared = std::make_shared<const CaptureAvoidSpec>(std::move(spec));
  return Applier<A>::dynamic(
      std::move(desc),
      [shared](EGraph<A> &g, EClassId id, const Subst &s) { return capture_avoid_apply(g, id, s, *shared); },
      std::move(reads),
      [shared](const EGraph<A> &g, EClassId id, Subst &s) { return capture_avoid_prepare(g, id, s, *shared); });
}

}  // namespace eqsat
