#pragma once

#include <algorithm>
#include <cassert>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/enode.hpp"
#include "eqsat/language.hpp"

namespace eqsat {

/// Pattern variable, written `?name`.
struct Var {
  Symbol name;

  Var() = default;
  explicit Var(Symbol s) : name(s) {}
  explicit Var(std::string_view s);

  friend bool operator==(Var, Var) = default;
  friend auto operator<=>(Var a, Var b) { return a.name <=> b.name; }
};

/// Variable to e-class binding produced by e-matching. Bindings keep the order
/// in which the pattern first mentions each variable.
class Subst {
 public:
  [[nodiscard]] std::optional<EClassId> get(Var v) const {
    for (const auto &[var, id] : bindings_) {
      if (var == v) return id;
    }
    return std::nullopt;
  }

  /// Throws std::out_of_range for an unbound variable.
  [[nodiscard]] EClassId operator[](Var v) const {
    if (auto id = get(v)) return *id;
    throw std::out_of_range("unbound pattern variable " + std::string(v.name.str()));
  }

  /// Binds or rebinds `v`.
  void insert(Var v, EClassId id) {
    for (auto &[var, bound] : bindings_) {
      if (var == v) {
        bound = id;
        return;
      }
    }
    bindings_.emplace_back(v, id);
  }

  [[nodiscard]] const std::vector<std::pair<Var, EClassId>> &bindings() const { return bindings_; }
  [[nodiscard]] size_t size() const { return bindings_.size(); }

  friend bool operator==(const Subst &a, const Subst &b) { return a.bindings_ == b.bindings_; }
  friend bool operator<(const Subst &a, const Subst &b) {
    return std::lexicographical_compare(a.bindings_.begin(), a.bindings_.end(), b.bindings_.begin(),
                                        b.bindings_.end(), [](const auto &x, const auto &y) {
                                          if (x.first != y.first) return x.first < y.first;
                                          return x.second < y.second;
                                        });
  }

 private:
  std::vector<std::pair<Var, EClassId>> bindings_;
};

/// Instructions of the matching machine. Registers hold e-class ids; register
/// 0 is the class being searched.
struct MatchInstr {
  enum class Kind { Bind, Compare };
  Kind kind;
  uint32_t reg = 0;  // Bind: class to scan. Compare: first register.
  Op op;             // Bind only
  uint32_t arity = 0;
  uint32_t out = 0;  // Bind: first register receiving children. Compare: second register.
};

struct MatchProgram {
  std::vector<MatchInstr> instrs;
  uint32_t num_regs = 1;
  /// Register holding each pattern variable, in first-occurrence order.
  std::vector<std::pair<Var, uint32_t>> var_regs;
};

/// Term with variables. Stored flat, children before parents, root last.
class Pattern {
 public:
  struct Node {
    std::optional<Var> var;
    Op op;
    std::vector<uint32_t> children;

    [[nodiscard]] bool is_var() const { return var.has_value(); }
  };

  Pattern() = default;
  explicit Pattern(std::vector<Node> nodes);

  static Pattern parse(std::string_view text, const LanguageDef &lang);
  static Pattern from_sexpr(const SExpr &sexpr, const LanguageDef &lang);
  static Pattern variable(Var v);
  /// Ground pattern for a term.
  static Pattern from_term(const Term &t);

  [[nodiscard]] const std::vector<Node> &nodes() const { return nodes_; }
  [[nodiscard]] uint32_t root() const { return static_cast<uint32_t>(nodes_.size() - 1); }
  [[nodiscard]] const Node &operator[](uint32_t i) const { return nodes_[i]; }
  /// Variables in first-occurrence (preorder) order.
  [[nodiscard]] const std::vector<Var> &vars() const { return vars_; }
  [[nodiscard]] bool mentions(Var v) const { return std::find(vars_.begin(), vars_.end(), v) != vars_.end(); }
  [[nodiscard]] const MatchProgram &program() const { return program_; }
  [[nodiscard]] size_t depth() const;
  [[nodiscard]] std::string to_string() const;

 private:
  void collect_vars(uint32_t node);
  void compile(uint32_t node, uint32_t reg, std::vector<std::optional<uint32_t>> &var_reg_of);

  std::vector<Node> nodes_;
  std::vector<Var> vars_;
  MatchProgram program_;
};

MatchProgram compile(const Pattern &p);

/// All substitutions under which a pattern is represented in one class.
struct SearchMatches {
  EClassId eclass;
  std::vector<Subst> substs;
};

namespace detail {

template <class A>
class Machine {
 public:
  Machine(const EGraph<A> &g, const MatchProgram &prog) : g_(g), prog_(prog), regs_(prog.num_regs) {}

  void run(EClassId eclass, std::vector<Subst> &out) {
    regs_[0] = eclass;
    out_ = &out;
    step(0);
  }

 private:
  void step(size_t pc) {
    if (pc == prog_.instrs.size()) {
      Subst s;
      for (const auto &[var, reg] : prog_.var_regs) s.insert(var, g_.find(regs_[reg]));
      out_->push_back(std::move(s));
      return;
    }
    const MatchInstr &in = prog_.instrs[pc];
    if (in.kind == MatchInstr::Kind::Compare) {
      if (g_.find(regs_[in.reg]) == g_.find(regs_[in.out])) step(pc + 1);
      return;
    }
    const auto &cls = g_[regs_[in.reg]];
    auto [lo, hi] = cls.nodes_with(in.op);
    for (auto it = lo; it != hi; ++it) {
      if (it->children.size() != in.arity) continue;
      for (uint32_t i = 0; i < in.arity; ++i) regs_[in.out + i] = it->children[i];
      step(pc + 1);
    }
  }

  const EGraph<A> &g_;
  const MatchProgram &prog_;
  std::vector<EClassId> regs_;
  std::vector<Subst> *out_ = nullptr;
};

}  // namespace detail

/// Matches of `p` rooted at one class, deduplicated and sorted.
template <class A>
std::vector<Subst> ematch_class(const EGraph<A> &g, const Pattern &p, EClassId eclass) {
  std::vector<Subst> substs;
  detail::Machine<A> m(g, p.program());
  m.run(g.find(eclass), substs);
  std::sort(substs.begin(), substs.end());
  substs.erase(std::unique(substs.begin(), substs.end()), substs.end());
  return substs;
}

/// Every (substitution, class) pair such that p[subst] is represented in the
/// class. Requires a clean graph; results are ordered by class id.
template <class A>
std::vector<SearchMatches> ematch(const EGraph<A> &g, const Pattern &p) {
  assert(g.is_clean() && "e-matching needs a rebuilt e-graph");
  std::vector<SearchMatches> out;
  const auto &root = p[p.root()];
  detail::Machine<A> m(g, p.program());
  g.for_each_class([&](const typename EGraph<A>::Class &c) {
    if (!root.is_var()) {
      auto [lo, hi] = c.nodes_with(root.op);
      if (lo == hi) return;
    }
    std::vector<Subst> substs;
    m.run(c.id, substs);
    if (substs.empty()) return;
    std::sort(substs.begin(), substs.end());
    substs.erase(std::unique(substs.begin(), substs.end()), substs.end());
    out.push_back(SearchMatches{c.id, std::move(substs)});
  });
  return out;
}

/// Instantiates `p` under `subst` bottom-up through add; returns the root class.
template <class A>
EClassId apply_pattern(EGraph<A> &g, const Pattern &p, const Subst &subst) {
  std::vector<EClassId> ids;
  ids.reserve(p.nodes().size());
  for (const auto &n : p.nodes()) {
    if (n.is_var()) {
      ids.push_back(subst[*n.var]);
      continue;
    }
    ENode node(n.op);
    node.children.reserve(n.children.size());
    for (auto c : n.children) node.children.push_back(ids[c]);
    ids.push_back(g.add(std::move(node)));
  }
  return ids.back();
}

/// Like apply_pattern but never adds: absent when some subterm is not represented.
template <class A>
std::optional<EClassId> lookup_pattern(const EGraph<A> &g, const Pattern &p, const Subst &subst) {
  std::vector<EClassId> ids;
  ids.reserve(p.nodes().size());
  for (const auto &n : p.nodes()) {
    if (n.is_var()) {
      ids.push_back(g.find(subst[*n.var]));
      continue;
    }
    ENode node(n.op);
    for (auto c : n.children) node.children.push_back(ids[c]);
    auto found = g.lookup(node);
    if (!found) return std::nullopt;
    ids.push_back(*found);
  }
  return ids.back();
}

}  // namespace eqsat
