#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eqsat/language.hpp"
#include "eqsat/pattern.hpp"
#include "eqsat/rewrite.hpp"

namespace eqsat {

/// One parsed line of a rules file:
///   name: <lhs> => <rhs> [if is-const ?x | is-nonzero ?x | not-same-var ?a ?b | eq <p1> <p2>]
/// Blank lines and lines starting with `#` or `;` are skipped.
struct RuleSpec {
  enum class Guard { None, IsConst, IsNonzero, NotSameVar, Equal };

  std::string name;
  Pattern lhs;
  Pattern rhs;
  Guard guard = Guard::None;
  std::vector<Var> guard_vars;
  std::vector<Pattern> guard_patterns;
  size_t line = 0;
};

std::vector<RuleSpec> parse_rule_specs(std::string_view text, const LanguageDef &lang);

template <ConstantAnalysis A>
Rewrite<A> make_rewrite(const RuleSpec &spec) {
  auto rhs = Applier<A>::pattern(spec.rhs);
  switch (spec.guard) {
    case RuleSpec::Guard::None:
      return Rewrite<A>(spec.name, spec.lhs, std::move(rhs));
    case RuleSpec::Guard::IsConst:
      return Rewrite<A>(spec.name, spec.lhs, Applier<A>::conditional(is_const<A>(spec.guard_vars[0]), std::move(rhs)));
    case RuleSpec::Guard::IsNonzero:
      return Rewrite<A>(spec.name, spec.lhs,
                        Applier<A>::conditional(is_nonzero_const<A>(spec.guard_vars[0]), std::move(rhs)));
    case RuleSpec::Guard::NotSameVar:
      return Rewrite<A>(spec.name, spec.lhs,
                        Applier<A>::conditional(not_same_var<A>(spec.guard_vars[0], spec.guard_vars[1]), std::move(rhs)));
    case RuleSpec::Guard::Equal:
      return Rewrite<A>(
          spec.name, spec.lhs,
          Applier<A>::conditional(condition_equal<A>(spec.guard_patterns[0], spec.guard_patterns[1]), std::move(rhs)));
  }
  throw std::logic_error("unhandled guard");
}

/// Parses a rules file into rewrites. Throws ParseError (with the line
/// number in the message) on malformed lines or unbound right-hand variables.
template <ConstantAnalysis A>
std::vector<Rewrite<A>> parse_rules(std::string_view text, const LanguageDef &lang) {
  std::vector<Rewrite<A>> out;
  for (const auto &spec : parse_rule_specs(text, lang)) {
    try {
      out.push_back(make_rewrite<A>(spec));
    } catch (const std::invalid_argument &e) {
      throw ParseError("line " + std::to_string(spec.line) + ": " + e.what(), 0);
    }
  }
  return out;
}

}  // namespace eqsat
