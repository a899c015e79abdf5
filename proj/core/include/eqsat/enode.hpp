#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <ostream>
#include <vector>

#include "eqsat/language.hpp"

namespace eqsat {

/// Opaque e-class identifier. Ids are never reused; a merged-away id stays
/// valid and resolves to its representative through find.
class EClassId {
 public:
  constexpr EClassId() = default;
  constexpr explicit EClassId(uint32_t index) : index_(index) {}

  [[nodiscard]] constexpr uint32_t index() const { return index_; }

  friend constexpr bool operator==(EClassId, EClassId) = default;
  friend constexpr auto operator<=>(EClassId, EClassId) = default;

  friend std::ostream &operator<<(std::ostream &os, EClassId id) { return os << id.index_; }

 private:
  uint32_t index_ = 0;
};

/// Operator applied to child e-classes.
struct ENode {
  Op op;
  std::vector<EClassId> children;

  ENode() = default;
  explicit ENode(Op o, std::vector<EClassId> ch = {}) : op(o), children(std::move(ch)) {}

  [[nodiscard]] bool is_leaf() const { return children.empty(); }

  friend bool operator==(const ENode &, const ENode &) = default;
  friend std::strong_ordering operator<=>(const ENode &a, const ENode &b) {
    if (auto c = a.op <=> b.op; c != 0) return c;
    if (a.children.size() != b.children.size()) return a.children.size() <=> b.children.size();
    for (size_t i = 0; i < a.children.size(); ++i) {
      if (auto c = a.children[i] <=> b.children[i]; c != 0) return c;
    }
    return std::strong_ordering::equal;
  }
};

struct ENodeHash {
  size_t operator()(const ENode &n) const noexcept {
    size_t h = n.op.hash();
    for (auto c : n.children) h = h * 0x9E3779B97F4A7C15ull + c.index() + 0x7F4A7C15;
    return h;
  }
};

}  // namespace eqsat

template <>
struct std::hash<eqsat::EClassId> {
  size_t operator()(eqsat::EClassId id) const noexcept { return std::hash<uint32_t>{}(id.index()); }
};
