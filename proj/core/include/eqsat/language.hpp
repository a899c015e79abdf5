#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "eqsat/symbol.hpp"

namespace eqsat {

/// Data carried by a childless node.
using LeafValue = std::variant<int64_t, bool, Symbol>;

std::string to_string(const LeafValue &value);

/// The head of a node: an operator symbol or a leaf payload.
class Op {
 public:
  enum class Kind : uint8_t { Operator, Int, Bool, Sym };

  Op() = default;

  static Op op(Symbol s) { return Op(Kind::Operator, s.index()); }
  static Op op(std::string_view name) { return op(Symbol(name)); }
  static Op integer(int64_t v) { return Op(Kind::Int, v); }
  static Op boolean(bool v) { return Op(Kind::Bool, v ? 1 : 0); }
  static Op symbol(Symbol s) { return Op(Kind::Sym, s.index()); }
  static Op symbol(std::string_view name) { return symbol(Symbol(name)); }
  static Op leaf(const LeafValue &v);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_leaf() const { return kind_ != Kind::Operator; }
  [[nodiscard]] bool is_operator() const { return kind_ == Kind::Operator; }

  /// Operator name or symbol-leaf name. Only valid for Operator and Sym.
  [[nodiscard]] Symbol name() const { return Symbol::from_index(static_cast<uint32_t>(value_)); }
  [[nodiscard]] int64_t as_int() const { return value_; }
  [[nodiscard]] bool as_bool() const { return value_ != 0; }
  [[nodiscard]] std::optional<LeafValue> leaf_value() const;

  [[nodiscard]] size_t hash() const {
    return std::hash<int64_t>{}(value_) * 31 + static_cast<size_t>(kind_);
  }

  friend bool operator==(const Op &a, const Op &b) = default;
  friend std::strong_ordering operator<=>(const Op &a, const Op &b);

 private:
  Op(Kind kind, int64_t value) : kind_(kind), value_(value) {}

  Kind kind_ = Kind::Operator;
  int64_t value_ = 0;
};

std::string to_string(const Op &op);

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string &what, size_t position)
      : std::runtime_error(what + " (at offset " + std::to_string(position) + ")"), position_(position) {}

  [[nodiscard]] size_t position() const { return position_; }

 private:
  size_t position_;
};

/// Runtime description of a term language: operator arities and admitted leaf kinds.
class LanguageDef {
 public:
  struct Leaves {
    bool integers = true;
    bool booleans = false;
    bool symbols = true;
  };

  LanguageDef(std::string name, const std::vector<std::pair<std::string, unsigned>> &operators, Leaves leaves);

  [[nodiscard]] const std::string &name() const { return name_; }
  [[nodiscard]] std::optional<unsigned> arity(Symbol op) const;
  [[nodiscard]] bool has_operator(Symbol op) const { return arity(op).has_value(); }
  [[nodiscard]] const Leaves &leaves() const { return leaves_; }
  /// Operators in declaration order.
  [[nodiscard]] const std::vector<std::pair<Symbol, unsigned>> &operators() const { return ordered_; }

 private:
  std::string name_;
  std::unordered_map<Symbol, unsigned> arities_;
  std::vector<std::pair<Symbol, unsigned>> ordered_;
  Leaves leaves_;
};

/// Ground term stored as a flat node array; children precede parents and the
/// root is the last node.
class Term {
 public:
  struct Node {
    Op op;
    std::vector<uint32_t> children;
  };

  uint32_t add(Op op, std::vector<uint32_t> children = {});

  [[nodiscard]] bool empty() const { return nodes_.empty(); }
  [[nodiscard]] size_t size() const { return nodes_.size(); }
  [[nodiscard]] uint32_t root() const { return static_cast<uint32_t>(nodes_.size() - 1); }
  [[nodiscard]] const Node &operator[](uint32_t i) const { return nodes_[i]; }
  [[nodiscard]] const std::vector<Node> &nodes() const { return nodes_; }

  /// Number of nodes in the tree view (shared subterms counted per use).
  [[nodiscard]] size_t tree_size() const;
  [[nodiscard]] size_t depth() const;

  /// Structural equality of the trees rooted at the roots.
  friend bool operator==(const Term &a, const Term &b);

 private:
  std::vector<Node> nodes_;
};

/// Minimal s-expression reader shared by the term, pattern and rules parsers.
struct SExpr {
  bool is_atom = true;
  std::string atom;
  std::vector<SExpr> items;
  size_t position = 0;
};

/// Reads every top-level s-expression in `text`.
std::vector<SExpr> read_sexprs(std::string_view text);
/// Reads exactly one s-expression; trailing input is an error.
SExpr read_sexpr(std::string_view text);

/// Classifies an atom against a language. Throws ParseError on unknown
/// operators and arity mismatches.
Op parse_atom(const std::string &atom, size_t position, const LanguageDef &lang);

Term parse_term(std::string_view text, const LanguageDef &lang);
Term term_from_sexpr(const SExpr &sexpr, const LanguageDef &lang);
std::string print_term(const Term &term);
std::string print_term(const Term &term, uint32_t root);

}  // namespace eqsat
