#pragma once

#include <concepts>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "eqsat/enode.hpp"
#include "eqsat/language.hpp"

namespace eqsat {

template <class A>
class EGraph;

/// An e-class analysis attaches a semilattice value to every e-class.
///
/// - `make(g, n)` computes the value of a fresh singleton class holding `n`
///   from the data of `n`'s children. It must only read children's data.
/// - `join(into, from)` joins `from` into `into` and reports whether `into`
///   changed. (Data, join) must be associative, commutative and idempotent.
/// - `modify(g, id)` may add e-nodes to the class and merge them in. It must be
///   idempotent when nothing else changes.
///
/// Termination of rebuilding relies on the data having finite ascending
/// chains over the values actually reached.
template <class A>
concept Analysis = std::copyable<typename A::Data> && std::equality_comparable<typename A::Data> &&
                   requires(const A &a, const EGraph<A> &cg, EGraph<A> &g, const ENode &n, typename A::Data &d,
                            EClassId id) {
                     { a.make(cg, n) } -> std::same_as<typename A::Data>;
                     { a.join(d, std::move(d)) } -> std::same_as<bool>;
                     a.modify(g, id);
                   };

/// Analyses that expose a known constant per class (used by `is-const`).
template <class A>
concept ConstantAnalysis = Analysis<A> && requires(const typename A::Data &d) {
  { A::constant_of(d) } -> std::same_as<std::optional<LeafValue>>;
};

/// Raised when two classes carrying different constants are merged.
class AnalysisContradiction : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Join of optional constants: absent is bottom, two present constants must agree.
inline bool join_constants(std::optional<LeafValue> &into, const std::optional<LeafValue> &from) {
  if (!from) return false;
  if (!into) {
    into = from;
    return true;
  }
  if (*into != *from) {
    throw AnalysisContradiction("conflicting constants " + to_string(*into) + " and " + to_string(*from) +
                                " merged into one e-class");
  }
  return false;
}

/// Unit analysis for graphs that need no per-class data.
struct NoAnalysis {
  using Data = std::monostate;

  Data make(const EGraph<NoAnalysis> &, const ENode &) const { return {}; }
  bool join(Data &, Data) const { return false; }
  void modify(EGraph<NoAnalysis> &, EClassId) const {}
};

template <class A>
std::string format_data(const typename A::Data &d) {
  if constexpr (requires { A::format(d); }) {
    return A::format(d);
  } else {
    return "()";
  }
}

}  // namespace eqsat
