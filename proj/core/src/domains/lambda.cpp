#include "eqsat/domains/lambda.hpp"

#include <algorithm>
#include <iterator>

namespace eqsat {

const LanguageDef &lambda_language() {
  static const LanguageDef lang("lambda",
                                {{"+", 2},
                                 {"=", 2},
                                 {"if", 3},
                                 {"app", 2},
                                 {"lam", 2},
                                 {"let", 3},
                                 {"fix", 2},
                                 {"var", 1},
                                 {"subst", 3}},
                                LanguageDef::Leaves{.integers = true, .booleans = true, .symbols = true});
  return lang;
}

namespace {

struct Ops {
  Symbol add{"+"}, eq{"="}, lam{"lam"}, let{"let"}, fix{"fix"}, var{"var"};
};

const Ops &ops() {
  static const Ops o;
  return o;
}

void unite(std::vector<EClassId> &into, const std::vector<EClassId> &from) {
  std::vector<EClassId> out;
  out.reserve(into.size() + from.size());
  std::set_union(into.begin(), into.end(), from.begin(), from.end(), std::back_inserter(out));
  into.swap(out);
}

void remove(std::vector<EClassId> &set, EClassId id) {
  auto it = std::lower_bound(set.begin(), set.end(), id);
  if (it != set.end() && *it == id) set.erase(it);
}

std::optional<LeafValue> eval(const Symbol op, const std::optional<LeafValue> &a, const std::optional<LeafValue> &b) {
  if (!a || !b) return std::nullopt;
  if (op == ops().eq) return LeafValue(*a == *b);
  const auto *x = std::get_if<int64_t>(&*a);
  const auto *y = std::get_if<int64_t>(&*b);
  int64_t r = 0;
  if (x && y && !__builtin_add_overflow(*x, *y, &r)) return LeafValue(r);
  return std::nullopt;
}

}  // namespace

LambdaAnalysis::Data LambdaAnalysis::make(const EGraph<LambdaAnalysis> &g, const ENode &n) const {
  Data d;
  if (n.op.is_leaf()) {
    if (n.op.kind() != Op::Kind::Sym) d.constant = n.op.leaf_value();
    return d;
  }
  const auto &o = ops();
  const Symbol op = n.op.name();
  auto data = [&](size_t i) -> const Data & { return g[n.children[i]].data; };
  if (op == o.var) {
    d.free.push_back(g.find(n.children[0]));
  } else if (op == o.let) {
    d.free = data(2).free;
    remove(d.free, g.find(n.children[0]));
    unite(d.free, data(1).free);
  } else if (op == o.lam || op == o.fix) {
    d.free = data(1).free;
    remove(d.free, g.find(n.children[0]));
  } else {
    for (size_t i = 0; i < n.children.size(); ++i) unite(d.free, data(i).free);
  }
  if (op == o.add || op == o.eq) d.constant = eval(op, data(0).constant, data(1).constant);
  return d;
}

bool LambdaAnalysis::join(Data &into, Data from) const {
  size_t before = into.free.size();
  unite(into.free, from.free);
  bool changed = into.free.size() != before;
  return join_constants(into.constant, from.constant) || changed;
}

void LambdaAnalysis::modify(EGraph<LambdaAnalysis> &g, EClassId id) const {
  const auto &c = g[id].data.constant;
  if (!c) return;
  EClassId k = g.add(ENode(Op::leaf(*c)));
  g.merge(id, k);
}

bool LambdaAnalysis::is_free(const EGraph<LambdaAnalysis> &g, const Data &d, EClassId var) {
  EClassId v = g.find(var);
  return std::any_of(d.free.begin(), d.free.end(), [&](EClassId f) { return g.find(f) == v; });
}

std::string LambdaAnalysis::format(const Data &d) {
  std::string out = "{free=[";
  for (size_t i = 0; i < d.free.size(); ++i) {
    if (i) out += ' ';
    out += std::to_string(d.free[i].index());
  }
  out += "] const=";
  out += d.constant ? to_string(*d.constant) : "-";
  return out + "}";
}

namespace {

Pattern pat(const char *text) { return Pattern::parse(text, lambda_language()); }

LambdaRewrite rw(const char *name, const char *lhs, const char *rhs) {
  return LambdaRewrite(name, pat(lhs), pat(rhs));
}

using LApplier = Applier<LambdaAnalysis>;

}  // namespace

std::vector<LambdaRewrite> lambda_rules(EqualityCheck if_elim_check) {
  std::vector<LambdaRewrite> rules;
  // open term rules
  rules.push_back(rw("if-true", "(if true ?then ?else)", "?then"));
  rules.push_back(rw("if-false", "(if false ?then ?else)", "?else"));
  rules.emplace_back("if-elim", pat("(if (= (var ?x) ?e) ?then ?else)"),
                     LApplier::conditional(condition_equal<LambdaAnalysis>(pat("(let ?x ?e ?then)"),
                                                                           pat("(let ?x ?e ?else)"), if_elim_check),
                                           LApplier::pattern(pat("?else"))));
  rules.push_back(rw("add-comm", "(+ ?a ?b)", "(+ ?b ?a)"));
  rules.push_back(rw("add-assoc", "(+ (+ ?a ?b) ?c)", "(+ ?a (+ ?b ?c))"));
  rules.push_back(rw("eq-comm", "(= ?a ?b)", "(= ?b ?a)"));

  // substitution introduction
  rules.push_back(rw("fix", "(fix ?v ?e)", "(let ?v (fix ?v ?e) ?e)"));
  rules.push_back(rw("beta", "(app (lam ?v ?body) ?e)", "(let ?v ?e ?body)"));

  // substitution propagation
  rules.push_back(rw("let-app", "(let ?v ?e (app ?a ?b))", "(app (let ?v ?e ?a) (let ?v ?e ?b))"));
  rules.push_back(rw("let-add", "(let ?v ?e (+ ?a ?b))", "(+ (let ?v ?e ?a) (let ?v ?e ?b))"));
  rules.push_back(rw("let-eq", "(let ?v ?e (= ?a ?b))", "(= (let ?v ?e ?a) (let ?v ?e ?b))"));
  rules.push_back(rw("let-if", "(let ?v ?e (if ?cond ?then ?else))",
                     "(if (let ?v ?e ?cond) (let ?v ?e ?then) (let ?v ?e ?else))"));

  // substitution elimination
  rules.emplace_back("let-const", pat("(let ?v ?e ?c)"),
                     LApplier::conditional(is_const<LambdaAnalysis>(Var("?c")), LApplier::pattern(pat("?c"))));
  rules.push_back(rw("let-var-same", "(let ?v1 ?e (var ?v1))", "?e"));
  rules.emplace_back("let-var-diff", pat("(let ?v1 ?e (var ?v2))"),
                     LApplier::conditional(not_same_var<LambdaAnalysis>(Var("?v1"), Var("?v2")),
                                           LApplier::pattern(pat("(var ?v2)"))));
  rules.push_back(rw("let-lam-same", "(let ?v1 ?e (lam ?v1 ?body))", "(lam ?v1 ?body)"));
  rules.emplace_back(
      "let-lam-diff", pat("(let ?v1 ?e (lam ?v2 ?body))"),
      LApplier::conditional(not_same_var<LambdaAnalysis>(Var("?v1"), Var("?v2")),
                            capture_avoid<LambdaAnalysis>(CaptureAvoidSpec{
                                Var("?fresh"), Var("?v2"), Var("?e"), pat("(lam ?v2 (let ?v1 ?e ?body))"),
                                pat("(lam ?fresh (let ?v1 ?e (let ?v2 (var ?fresh) ?body)))")})));
  return rules;
}

}  // namespace eqsat
