#include "eqsat/pattern.hpp"

namespace eqsat {

Var::Var(std::string_view s) : name(s) {
  if (s.size() < 2 || s.front() != '?') throw std::invalid_argument("pattern variables are written ?name");
}

namespace {

uint32_t build(const SExpr &e, const LanguageDef &lang, std::vector<Pattern::Node> &out) {
  if (e.is_atom) {
    if (e.atom.front() == '?') {
      if (e.atom.size() < 2) throw ParseError("empty pattern variable name", e.position);
      out.push_back(Pattern::Node{Var(Symbol(e.atom)), Op(), {}});
    } else {
      out.push_back(Pattern::Node{std::nullopt, parse_atom(e.atom, e.position, lang), {}});
    }
    return static_cast<uint32_t>(out.size() - 1);
  }
  const SExpr &head = e.items.front();
  if (!head.is_atom || head.atom.front() == '?') {
    throw ParseError("pattern list head must be an operator", head.position);
  }
  Symbol op(head.atom);
  auto arity = lang.arity(op);
  if (!arity) throw ParseError("unknown operator '" + head.atom + "' in language " + lang.name(), head.position);
  if (*arity != e.items.size() - 1) {
    throw ParseError("operator '" + head.atom + "' expects " + std::to_string(*arity) + " arguments, got " +
                         std::to_string(e.items.size() - 1),
                     head.position);
  }
  std::vector<uint32_t> children;
  for (size_t i = 1; i < e.items.size(); ++i) children.push_back(build(e.items[i], lang, out));
  out.push_back(Pattern::Node{std::nullopt, Op::op(op), std::move(children)});
  return static_cast<uint32_t>(out.size() - 1);
}

void print(const Pattern &p, uint32_t i, std::string &out) {
  const auto &n = p[i];
  if (n.is_var()) {
    out += n.var->name.str();
    return;
  }
  if (n.children.empty()) {
    out += eqsat::to_string(n.op);
    return;
  }
  out += '(';
  out += eqsat::to_string(n.op);
  for (auto c : n.children) {
    out += ' ';
    print(p, c, out);
  }
  out += ')';
}

}  // namespace

Pattern::Pattern(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw std::invalid_argument("empty pattern");
  for (uint32_t i = 0; i < nodes_.size(); ++i) {
    for (auto c : nodes_[i].children) {
      if (c >= i) throw std::invalid_argument("pattern children must precede their parent");
    }
  }
  collect_vars(root());
  std::vector<std::optional<uint32_t>> var_reg_of(vars_.size());
  program_.num_regs = 1;
  compile(root(), 0, var_reg_of);
  for (size_t i = 0; i < vars_.size(); ++i) program_.var_regs.emplace_back(vars_[i], *var_reg_of[i]);
}

void Pattern::collect_vars(uint32_t node) {
  const auto &n = nodes_[node];
  if (n.is_var()) {
    if (!mentions(*n.var)) vars_.push_back(*n.var);
    return;
  }
  for (auto c : n.children) collect_vars(c);
}

void Pattern::compile(uint32_t node, uint32_t reg, std::vector<std::optional<uint32_t>> &var_reg_of) {
  const auto &n = nodes_[node];
  if (n.is_var()) {
    auto idx = static_cast<size_t>(std::find(vars_.begin(), vars_.end(), *n.var) - vars_.begin());
    if (var_reg_of[idx]) {
      // nonlinear occurrence: both registers must hold the same class
      program_.instrs.push_back(MatchInstr{MatchInstr::Kind::Compare, *var_reg_of[idx], Op(), 0, reg});
    } else {
      var_reg_of[idx] = reg;
    }
    return;
  }
  auto arity = static_cast<uint32_t>(n.children.size());
  uint32_t out = program_.num_regs;
  program_.num_regs += arity;
  program_.instrs.push_back(MatchInstr{MatchInstr::Kind::Bind, reg, n.op, arity, out});
  for (uint32_t i = 0; i < arity; ++i) compile(n.children[i], out + i, var_reg_of);
}

Pattern Pattern::parse(std::string_view text, const LanguageDef &lang) { return from_sexpr(read_sexpr(text), lang); }

Pattern Pattern::from_sexpr(const SExpr &sexpr, const LanguageDef &lang) {
  std::vector<Node> nodes;
  build(sexpr, lang, nodes);
  return Pattern(std::move(nodes));
}

Pattern Pattern::variable(Var v) { return Pattern({Node{v, Op(), {}}}); }

Pattern Pattern::from_term(const Term &t) {
  std::vector<Node> nodes;
  nodes.reserve(t.size());
  for (const auto &n : t.nodes()) nodes.push_back(Node{std::nullopt, n.op, n.children});
  return Pattern(std::move(nodes));
}

size_t Pattern::depth() const {
  std::vector<size_t> d(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    size_t m = 0;
    for (auto c : nodes_[i].children) m = std::max(m, d[c]);
    d[i] = m + 1;
  }
  return d.back();
}

std::string Pattern::to_string() const {
  std::string out;
  print(*this, root(), out);
  return out;
}

MatchProgram compile(const Pattern &p) { return p.program(); }

}  // namespace eqsat
