#include "eqsat/rules_file.hpp"

#include <sstream>

namespace eqsat {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_atom(const SExpr &e, std::string_view text) { return e.is_atom && e.atom == text; }

}  // namespace

std::vector<RuleSpec> parse_rule_specs(std::string_view text, const LanguageDef &lang) {
  std::vector<RuleSpec> out;
  std::istringstream in{std::string(text)};
  std::string raw;
  size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '#' || line.front() == ';') continue;
    auto fail = [&](const std::string &msg, size_t pos = 0) {
      throw ParseError("line " + std::to_string(lineno) + ": " + msg, pos);
    };
    auto colon = line.find(':');
    if (colon == std::string_view::npos) fail("expected `name: lhs => rhs`");
    RuleSpec spec;
    spec.line = lineno;
    spec.name = std::string(trim(line.substr(0, colon)));
    if (spec.name.empty()) fail("empty rule name");

    std::vector<SExpr> items;
    try {
      items = read_sexprs(line.substr(colon + 1));
    } catch (const ParseError &e) {
      fail(e.what(), e.position());
    }
    if (items.size() < 3 || !is_atom(items[1], "=>")) fail("expected `lhs => rhs`");
    try {
      spec.lhs = Pattern::from_sexpr(items[0], lang);
      spec.rhs = Pattern::from_sexpr(items[2], lang);
      if (items.size() > 3) {
        if (!is_atom(items[3], "if") || items.size() < 5 || !items[4].is_atom) fail("expected `if <condition>`");
        const std::string &cond = items[4].atom;
        size_t nargs = items.size() - 5;
        auto var_arg = [&](size_t i) {
          const SExpr &a = items[5 + i];
          if (!a.is_atom || a.atom.front() != '?') fail("condition " + cond + " expects pattern variables");
          return Var(a.atom);
        };
        if (cond == "is-const" || cond == "is-nonzero") {
          if (nargs != 1) fail(cond + " takes one variable");
          spec.guard = cond == "is-const" ? RuleSpec::Guard::IsConst : RuleSpec::Guard::IsNonzero;
          spec.guard_vars = {var_arg(0)};
        } else if (cond == "not-same-var") {
          if (nargs != 2) fail("not-same-var takes two variables");
          spec.guard = RuleSpec::Guard::NotSameVar;
          spec.guard_vars = {var_arg(0), var_arg(1)};
        } else if (cond == "eq") {
          if (nargs != 2) fail("eq takes two patterns");
          spec.guard = RuleSpec::Guard::Equal;
          spec.guard_patterns = {Pattern::from_sexpr(items[5], lang), Pattern::from_sexpr(items[6], lang)};
        } else {
          fail("unknown condition '" + cond + "'");
        }
      }
    } catch (const ParseError &e) {
      if (std::string_view(e.what()).starts_with("line ")) throw;
      fail(e.what(), e.position());
    } catch (const std::invalid_argument &e) {
      fail(e.what());
    }
    out.push_back(std::move(spec));
  }
  return out;
}

}  // namespace eqsat
