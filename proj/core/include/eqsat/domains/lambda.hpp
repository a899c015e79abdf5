#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqsat/egraph.hpp"
#include "eqsat/language.hpp"
#include "eqsat/rewrite.hpp"

namespace eqsat {

/// + = if app lam let fix var subst; Bool, Num and Symbol leaves.
const LanguageDef &lambda_language();

/// Free variables (as symbol class ids) and constant folding.
struct LambdaAnalysis {
  struct Data {
    /// Over-approximation of the free variables of every term in the class.
    /// Sorted, holding the class ids of the variable symbols.
    std::vector<EClassId> free;
    std::optional<LeafValue> constant;

    friend bool operator==(const Data &, const Data &) = default;
  };

  Data make(const EGraph<LambdaAnalysis> &g, const ENode &n) const;
  bool join(Data &into, Data from) const;
  void modify(EGraph<LambdaAnalysis> &g, EClassId id) const;

  static std::optional<LeafValue> constant_of(const Data &d) { return d.constant; }
  static bool is_free(const EGraph<LambdaAnalysis> &g, const Data &d, EClassId var);
  static std::string format(const Data &d);
};

using LambdaGraph = EGraph<LambdaAnalysis>;
using LambdaRewrite = Rewrite<LambdaAnalysis>;

/// The seventeen partial-evaluation rules. `let-lam-diff` performs
/// capture-avoiding substitution; `if-elim` instantiates both sides of its
/// equality check.
std::vector<LambdaRewrite> lambda_rules(EqualityCheck if_elim_check = EqualityCheck::AddThenCompare);

}  // namespace eqsat
