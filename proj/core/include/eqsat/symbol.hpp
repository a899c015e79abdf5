#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace eqsat {

/// Interned string. Two symbols with the same name share one index, so
/// equality and hashing are integer operations. Ordering is by name so that
/// sorted containers are stable across processes.
class Symbol {
 public:
  Symbol() : Symbol(std::string_view{}) {}
  explicit Symbol(std::string_view name);

  static Symbol from_index(uint32_t index) { return Symbol(index, 0); }

  [[nodiscard]] uint32_t index() const { return index_; }
  [[nodiscard]] std::string_view str() const;

  friend bool operator==(Symbol a, Symbol b) { return a.index_ == b.index_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b) {
    if (a.index_ == b.index_) return std::strong_ordering::equal;
    return a.str() <=> b.str();
  }

  friend std::ostream &operator<<(std::ostream &os, Symbol s) { return os << s.str(); }

 private:
  Symbol(uint32_t index, int) : index_(index) {}
  uint32_t index_;
};

}  // namespace eqsat

template <>
struct std::hash<eqsat::Symbol> {
  size_t operator()(eqsat::Symbol s) const noexcept { return std::hash<uint32_t>{}(s.index()); }
};
