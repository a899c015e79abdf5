#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/language.hpp"
#include "eqsat/rewrite.hpp"

namespace eqsat {

/// + * / << -, all binary; integer and symbol leaves.
const LanguageDef &math_language();

/// Integer constant folding. Folding is partial: overflow, division by zero,
/// inexact division and out-of-range shifts produce no constant.
struct MathAnalysis {
  using Data = std::optional<LeafValue>;

  Data make(const EGraph<MathAnalysis> &g, const ENode &n) const;
  bool join(Data &into, Data from) const { return join_constants(into, from); }
  void modify(EGraph<MathAnalysis> &g, EClassId id) const;

  static std::optional<LeafValue> constant_of(const Data &d) { return d; }
  static std::string format(const Data &d) { return d ? to_string(*d) : "-"; }
};

/// Checked evaluation of one math operator on integer constants.
std::optional<int64_t> math_fold(Symbol op, int64_t a, int64_t b);

using MathGraph = EGraph<MathAnalysis>;
using MathRewrite = Rewrite<MathAnalysis>;

/// Algebraic simplification rules. `x / x => 1` requires a nonzero constant
/// denominator unless `unsafe` is set.
std::vector<MathRewrite> math_rules(bool unsafe = false);

/// The four rewrites of the introductory example, with `x / x => 1` unguarded:
/// x*2 => x<<1, (x*y)/z => x*(y/z), x/x => 1, x*1 => x.
std::vector<MathRewrite> fig1_rules();

}  // namespace eqsat
