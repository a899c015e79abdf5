#include "eqsat/language.hpp"

#include <cctype>
#include <charconv>
#include <functional>

namespace eqsat {

std::string to_string(const LeafValue &value) {
  if (const auto *i = std::get_if<int64_t>(&value)) return std::to_string(*i);
  if (const auto *b = std::get_if<bool>(&value)) return *b ? "true" : "false";
  return std::string(std::get<Symbol>(value).str());
}

Op Op::leaf(const LeafValue &v) {
  if (const auto *i = std::get_if<int64_t>(&v)) return integer(*i);
  if (const auto *b = std::get_if<bool>(&v)) return boolean(*b);
  return symbol(std::get<Symbol>(v));
}

std::optional<LeafValue> Op::leaf_value() const {
  switch (kind_) {
    case Kind::Int:
      return LeafValue(value_);
    case Kind::Bool:
      return LeafValue(value_ != 0);
    case Kind::Sym:
      return LeafValue(name());
    case Kind::Operator:
      break;
  }
  return std::nullopt;
}

std::strong_ordering operator<=>(const Op &a, const Op &b) {
  if (a.kind_ != b.kind_) return a.kind_ <=> b.kind_;
  switch (a.kind_) {
    case Op::Kind::Operator:
    case Op::Kind::Sym:
      return a.name() <=> b.name();
    case Op::Kind::Int:
    case Op::Kind::Bool:
      break;
  }
  return a.value_ <=> b.value_;
}

std::string to_string(const Op &op) {
  switch (op.kind()) {
    case Op::Kind::Operator:
    case Op::Kind::Sym:
      return std::string(op.name().str());
    case Op::Kind::Int:
      return std::to_string(op.as_int());
    case Op::Kind::Bool:
      return op.as_bool() ? "true" : "false";
  }
  return {};
}

LanguageDef::LanguageDef(std::string name, const std::vector<std::pair<std::string, unsigned>> &operators,
                         Leaves leaves)
    : name_(std::move(name)), leaves_(leaves) {
  for (const auto &[op, arity] : operators) {
    Symbol sym(op);
    if (!arities_.emplace(sym, arity).second) {
      throw std::invalid_argument("duplicate operator '" + op + "' in language " + name_);
    }
    ordered_.emplace_back(sym, arity);
  }
}

std::optional<unsigned> LanguageDef::arity(Symbol op) const {
  auto it = arities_.find(op);
  if (it == arities_.end()) return std::nullopt;
  return it->second;
}

uint32_t Term::add(Op op, std::vector<uint32_t> children) {
  for (auto c : children) {
    if (c >= nodes_.size()) throw std::out_of_range("term child index must precede its parent");
  }
  nodes_.push_back(Node{op, std::move(children)});
  return static_cast<uint32_t>(nodes_.size() - 1);
}

size_t Term::tree_size() const {
  if (nodes_.empty()) return 0;
  std::vector<size_t> sizes(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    sizes[i] = 1;
    for (auto c : nodes_[i].children) sizes[i] += sizes[c];
  }
  return sizes.back();
}

size_t Term::depth() const {
  if (nodes_.empty()) return 0;
  std::vector<size_t> depths(nodes_.size());
  for (size_t i = 0; i < nodes_.size(); ++i) {
    size_t d = 0;
    for (auto c : nodes_[i].children) d = std::max(d, depths[c]);
    depths[i] = d + 1;
  }
  return depths.back();
}

bool operator==(const Term &a, const Term &b) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  std::function<bool(uint32_t, uint32_t)> same = [&](uint32_t x, uint32_t y) {
    const auto &nx = a[x];
    const auto &ny = b[y];
    if (nx.op != ny.op || nx.children.size() != ny.children.size()) return false;
    for (size_t i = 0; i < nx.children.size(); ++i) {
      if (!same(nx.children[i], ny.children[i])) return false;
    }
    return true;
  };
  return same(a.root(), b.root());
}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  SExpr read() {
    skip_space();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    SExpr out;
    out.position = pos_;
    char c = text_[pos_];
    if (c == ')') throw ParseError("unexpected ')'", pos_);
    if (c == '(') {
      ++pos_;
      out.is_atom = false;
      for (;;) {
        skip_space();
        if (pos_ >= text_.size()) throw ParseError("unclosed '('", out.position);
        if (text_[pos_] == ')') {
          ++pos_;
          break;
        }
        out.items.push_back(read());
      }
      if (out.items.empty()) throw ParseError("empty list", out.position);
      return out;
    }
    size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != '(' &&
           text_[pos_] != ')') {
      ++pos_;
    }
    out.atom = std::string(text_.substr(start, pos_ - start));
    return out;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == ';') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view text_;
  size_t pos_ = 0;
};

std::optional<int64_t> parse_integer(const std::string &atom, size_t position) {
  size_t digits_from = (atom[0] == '-' || atom[0] == '+') ? 1 : 0;
  if (digits_from == atom.size()) return std::nullopt;
  for (size_t i = digits_from; i < atom.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(atom[i]))) return std::nullopt;
  }
  int64_t value = 0;
  const char *first = atom.data() + (atom[0] == '+' ? 1 : 0);
  auto [ptr, ec] = std::from_chars(first, atom.data() + atom.size(), value);
  if (ec != std::errc() || ptr != atom.data() + atom.size()) {
    throw ParseError("integer literal out of range: " + atom, position);
  }
  return value;
}

uint32_t build_term(const SExpr &e, const LanguageDef &lang, Term &out) {
  if (e.is_atom) return out.add(parse_atom(e.atom, e.position, lang));
  const SExpr &head = e.items.front();
  if (!head.is_atom) throw ParseError("list head must be an operator", head.position);
  Symbol op(head.atom);
  auto arity = lang.arity(op);
  if (!arity) throw ParseError("unknown operator '" + head.atom + "' in language " + lang.name(), head.position);
  if (*arity != e.items.size() - 1) {
    throw ParseError("operator '" + head.atom + "' expects " + std::to_string(*arity) + " arguments, got " +
                         std::to_string(e.items.size() - 1),
                     head.position);
  }
  std::vector<uint32_t> children;
  children.reserve(*arity);
  for (size_t i = 1; i < e.items.size(); ++i) children.push_back(build_term(e.items[i], lang, out));
  return out.add(Op::op(op), std::move(children));
}

void print_into(const Term &t, uint32_t i, std::string &out) {
  const auto &node = t[i];
  if (node.children.empty()) {
    out += to_string(node.op);
    return;
  }
  out += '(';
  out += to_string(node.op);
  for (auto c : node.children) {
    out += ' ';
    print_into(t, c, out);
  }
  out += ')';
}

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) {
  Reader reader(text);
  std::vector<SExpr> out;
  while (!reader.at_end()) out.push_back(reader.read());
  return out;
}

SExpr read_sexpr(std::string_view text) {
  Reader reader(text);
  SExpr e = reader.read();
  if (!reader.at_end()) throw ParseError("trailing input after expression", 0);
  return e;
}

Op parse_atom(const std::string &atom, size_t position, const LanguageDef &lang) {
  if (auto value = parse_integer(atom, position)) {
    if (!lang.leaves().integers) throw ParseError("integer literals not allowed in " + lang.name(), position);
    return Op::integer(*value);
  }
  if (atom == "true" || atom == "false") {
    if (!lang.leaves().booleans) throw ParseError("boolean literals not allowed in " + lang.name(), position);
    return Op::boolean(atom == "true");
  }
  Symbol sym(atom);
  if (auto arity = lang.arity(sym)) {
    if (*arity != 0) {
      throw ParseError("operator '" + atom + "' expects " + std::to_string(*arity) + " arguments, got 0", position);
    }
    return Op::op(sym);
  }
  if (!lang.leaves().symbols) throw ParseError("unknown operator '" + atom + "' in language " + lang.name(), position);
  return Op::symbol(sym);
}

Term term_from_sexpr(const SExpr &sexpr, const LanguageDef &lang) {
  Term out;
  build_term(sexpr, lang, out);
  return out;
}

Term parse_term(std::string_view text, const LanguageDef &lang) { return term_from_sexpr(read_sexpr(text), lang); }

std::string print_term(const Term &term, uint32_t root) {
  std::string out;
  print_into(term, root, out);
  return out;
}

std::string print_term(const Term &term) { return term.empty() ? std::string() : print_term(term, term.root()); }

}  // namespace eqsat
