#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "eqsat/enode.hpp"

namespace eqsat {

/// Parent-pointer forest over e-class ids. The caller chooses the root on
/// union; compression happens only on the mutating find.
class UnionFind {
 public:
  EClassId make_set() {
    auto id = static_cast<uint32_t>(parents_.size());
    parents_.push_back(id);
    return EClassId(id);
  }

  [[nodiscard]] size_t size() const { return parents_.size(); }

  [[nodiscard]] EClassId find(EClassId id) const {
    uint32_t cur = checked(id);
    while (parents_[cur] != cur) cur = parents_[cur];
    return EClassId(cur);
  }

  EClassId find_mut(EClassId id) {
    uint32_t cur = checked(id);
    while (parents_[cur] != cur) {
      // path halving
      parents_[cur] = parents_[parents_[cur]];
      cur = parents_[cur];
    }
    return EClassId(cur);
  }

  /// Both arguments must be roots. `root` stays canonical.
  void union_roots(EClassId root, EClassId child) { parents_[child.index()] = root.index(); }

  [[nodiscard]] const std::vector<uint32_t> &parents() const { return parents_; }

 private:
  uint32_t checked(EClassId id) const {
    if (id.index() >= parents_.size()) throw std::out_of_range("invalid e-class id " + std::to_string(id.index()));
    return id.index();
  }

  std::vector<uint32_t> parents_;
};

}  // namespace eqsat
