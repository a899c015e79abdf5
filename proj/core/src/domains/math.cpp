#include "eqsat/domains/math.hpp"

#include <limits>

namespace eqsat {

const LanguageDef &math_language() {
  static const LanguageDef lang("math", {{"+", 2}, {"*", 2}, {"/", 2}, {"<<", 2}, {"-", 2}},
                                LanguageDef::Leaves{.integers = true, .booleans = false, .symbols = true});
  return lang;
}

std::optional<int64_t> math_fold(Symbol op, int64_t a, int64_t b) {
  int64_t r = 0;
  std::string_view name = op.str();
  if (name == "+") {
    if (__builtin_add_overflow(a, b, &r)) return std::nullopt;
    return r;
  }
  if (name == "-") {
    if (__builtin_sub_overflow(a, b, &r)) return std::nullopt;
    return r;
  }
  if (name == "*") {
    if (__builtin_mul_overflow(a, b, &r)) return std::nullopt;
    return r;
  }
  if (name == "/") {
    if (b == 0 || (a == std::numeric_limits<int64_t>::min() && b == -1) || a % b != 0) return std::nullopt;
    return a / b;
  }
  if (name == "<<") {
    if (b < 0 || b > 62) return std::nullopt;
    if (__builtin_mul_overflow(a, int64_t{1} << b, &r)) return std::nullopt;
    return r;
  }
  return std::nullopt;
}

MathAnalysis::Data MathAnalysis::make(const EGraph<MathAnalysis> &g, const ENode &n) const {
  if (n.op.kind() == Op::Kind::Int) return LeafValue(n.op.as_int());
  if (!n.op.is_operator() || n.children.size() != 2) return std::nullopt;
  const auto &a = g[n.children[0]].data;
  const auto &b = g[n.children[1]].data;
  if (!a || !b) return std::nullopt;
  const auto *x = std::get_if<int64_t>(&*a);
  const auto *y = std::get_if<int64_t>(&*b);
  if (!x || !y) return std::nullopt;
  if (auto r = math_fold(n.op.name(), *x, *y)) return LeafValue(*r);
  return std::nullopt;
}

void MathAnalysis::modify(EGraph<MathAnalysis> &g, EClassId id) const {
  const auto &d = g[id].data;
  if (!d) return;
  EClassId c = g.add(ENode(Op::leaf(*d)));
  g.merge(id, c);
}

namespace {

Pattern pat(const char *text) { return Pattern::parse(text, math_language()); }

MathRewrite rw(const char *name, const char *lhs, const char *rhs) { return MathRewrite(name, pat(lhs), pat(rhs)); }

MathRewrite div_self(bool unsafe) {
  if (unsafe) return rw("div-self", "(/ ?x ?x)", "1");
  return MathRewrite("div-self", pat("(/ ?x ?x)"),
                     Applier<MathAnalysis>::conditional(is_nonzero_const<MathAnalysis>(Var("?x")),
                                                        Applier<MathAnalysis>::pattern(pat("1"))));
}

}  // namespace

std::vector<MathRewrite> math_rules(bool unsafe) {
  std::vector<MathRewrite> rules;
  rules.push_back(rw("comm-add", "(+ ?a ?b)", "(+ ?b ?a)"));
  rules.push_back(rw("comm-mul", "(* ?a ?b)", "(* ?b ?a)"));
  rules.push_back(rw("assoc-add", "(+ ?a (+ ?b ?c))", "(+ (+ ?a ?b) ?c)"));
  rules.push_back(rw("assoc-mul", "(* ?a (* ?b ?c))", "(* (* ?a ?b) ?c)"));
  rules.push_back(rw("sub-canon", "(- ?a ?b)", "(+ ?a (* -1 ?b))"));
  rules.push_back(rw("zero-add", "(+ ?a 0)", "?a"));
  rules.push_back(rw("zero-mul", "(* ?a 0)", "0"));
  rules.push_back(rw("one-mul", "(* ?a 1)", "?a"));
  rules.push_back(rw("cancel-sub", "(- ?a ?a)", "0"));
  rules.push_back(rw("mul-two", "(* ?x 2)", "(<< ?x 1)"));
  rules.push_back(rw("shift-one", "(<< ?x 1)", "(* ?x 2)"));
  rules.push_back(rw("div-assoc", "(/ (* ?x ?y) ?z)", "(* ?x (/ ?y ?z))"));
  rules.push_back(div_self(unsafe));
  rules.push_back(rw("div-one", "(/ ?x 1)", "?x"));
  rules.push_back(rw("distribute", "(* ?a (+ ?b ?c))", "(+ (* ?a ?b) (* ?a ?c))"));
  rules.push_back(rw("factor", "(+ (* ?a ?b) (* ?a ?c))", "(* ?a (+ ?b ?c))"));
  return rules;
}

std::vector<MathRewrite> fig1_rules() {
  std::vector<MathRewrite> rules;
  rules.push_back(rw("mul-two", "(* ?x 2)", "(<< ?x 1)"));
  rules.push_back(rw("div-assoc", "(/ (* ?x ?y) ?z)", "(* ?x (/ ?y ?z))"));
  rules.push_back(div_self(true));
  rules.push_back(rw("one-mul", "(* ?x 1)", "?x"));
  return rules;
}

}  // namespace eqsat
