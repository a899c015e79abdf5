#pragma once

#include <algorithm>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqsat/egraph.hpp"

namespace eqsat {

class ExtractionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local cost: computed from the operator and the children's best costs.
template <class K>
concept CostFunction = requires(const K &k, const Op &op, std::span<const double> children) {
  { k(op, children) } -> std::convertible_to<double>;
};

struct AstSize {
  double operator()(const Op &, std::span<const double> children) const {
    double total = 1;
    for (double c : children) total += c;
    return total;
  }
};

struct AstDepth {
  double operator()(const Op &, std::span<const double> children) const {
    double deepest = 0;
    for (double c : children) deepest = std::max(deepest, c);
    return deepest + 1;
  }
};

/// AST size with per-operator weights (1 for operators not listed, and for leaves).
class WeightedAstSize {
 public:
  WeightedAstSize() = default;
  explicit WeightedAstSize(std::unordered_map<Symbol, double> weights) : weights_(std::move(weights)) {}

  void set(std::string_view op, double weight) { weights_[Symbol(op)] = weight; }

  double operator()(const Op &op, std::span<const double> children) const {
    double total = 1;
    if (op.is_operator()) {
      if (auto it = weights_.find(op.name()); it != weights_.end()) total = it->second;
    }
    for (double c : children) total += c;
    return total;
  }

 private:
  std::unordered_map<Symbol, double> weights_;
};

/// Bottom-up fixpoint over all classes computing the cheapest cost per class,
/// followed by a selection pass that picks one e-node per class.
///
/// Among e-nodes of minimal cost the winner is the smallest by operator, then
/// by the ranks of the children's selected terms. Ranks order classes by
/// (cost, operator, child ranks), so the choice does not depend on class ids.
template <class A, CostFunction K>
class Extractor {
 public:
  static constexpr double kInfinity = std::numeric_limits<double>::infinity();

  struct Entry {
    double cost = kInfinity;
    std::optional<ENode> node;
  };

  Extractor(const EGraph<A> &g, K cost = K{}) : g_(g), cost_(std::move(cost)), table_(g.num_ids()) {
    assert(g.is_clean() && "extraction needs a rebuilt e-graph");
    while (sweep()) ++sweeps_;
    select();
  }

  /// Best cost of the class containing `id`; infinity if no finite term exists.
  [[nodiscard]] double cost(EClassId id) const { return table_[g_.find(id).index()].cost; }
  [[nodiscard]] const Entry &entry(EClassId id) const { return table_[g_.find(id).index()]; }
  [[nodiscard]] size_t sweeps() const { return sweeps_; }

  /// Cost of an e-node under the current table.
  [[nodiscard]] std::optional<double> node_cost(const ENode &n) const {
    std::vector<double> child(n.children.size());
    for (size_t i = 0; i < n.children.size(); ++i) {
      child[i] = cost(n.children[i]);
      if (child[i] == kInfinity) return std::nullopt;
    }
    return static_cast<double>(cost_(n.op, child));
  }

  /// Reconstructs the best term rooted at `root`.
  [[nodiscard]] Term term(EClassId root) const {
    Term out;
    std::unordered_map<uint32_t, uint32_t> built;
    std::vector<uint32_t> on_path;
    build(g_.find(root), out, built, on_path);
    return out;
  }

  /// One pass of cost relaxation over every class; true iff some cost dropped.
  bool sweep() {
    bool changed = false;
    g_.for_each_class([&](const typename EGraph<A>::Class &c) {
      double best = kInfinity;
      for (const auto &n : c.nodes) {
        if (auto k = node_cost(n)) best = std::min(best, *k);
      }
      auto &slot = table_[c.id.index()];
      if (best < slot.cost) {
        slot.cost = best;
        changed = true;
      }
    });
    return changed;
  }

 private:
  using Key = std::pair<Op, std::vector<size_t>>;

  void select() {
    std::vector<EClassId> order;
    g_.for_each_class([&](const typename EGraph<A>::Class &c) {
      if (table_[c.id.index()].cost < kInfinity) order.push_back(c.id);
    });
    std::stable_sort(order.begin(), order.end(),
                     [&](EClassId a, EClassId b) { return table_[a.index()].cost < table_[b.index()].cost; });
    std::vector<size_t> rank(table_.size(), std::numeric_limits<size_t>::max());
    size_t next_rank = 0;
    for (size_t lo = 0; lo < order.size();) {
      size_t hi = lo;
      while (hi < order.size() && table_[order[hi].index()].cost == table_[order[lo].index()].cost) ++hi;
      // one cost level; zero-cost chains may need several passes
      std::vector<EClassId> pending(order.begin() + lo, order.begin() + hi);
      while (!pending.empty()) {
        std::vector<std::pair<Key, EClassId>> picked;
        std::vector<EClassId> rest;
        for (auto id : pending) {
          std::optional<Key> best;
          const ENode *best_node = nullptr;
          for (const auto &n : g_[id].nodes) {
            auto k = node_cost(n);
            if (!k || *k != table_[id.index()].cost) continue;
            Key key{n.op, {}};
            bool ready = true;
            for (auto c : n.children) {
              size_t r = rank[g_.find(c).index()];
              if (r == std::numeric_limits<size_t>::max()) {
                ready = false;
                break;
              }
              key.second.push_back(r);
            }
            if (ready && (!best || key < *best)) {
              best = std::move(key);
              best_node = &n;
            }
          }
          if (best_node) {
            table_[id.index()].node = *best_node;
            picked.emplace_back(std::move(*best), id);
          } else {
            rest.push_back(id);
          }
        }
        if (picked.empty()) throw ExtractionError("no acyclic selection for a zero-cost cycle");
        std::sort(picked.begin(), picked.end());
        for (const auto &[key, id] : picked) rank[id.index()] = next_rank++;
        pending.swap(rest);
      }
      lo = hi;
    }
  }

  uint32_t build(EClassId id, Term &out, std::unordered_map<uint32_t, uint32_t> &built,
                 std::vector<uint32_t> &on_path) const {
    if (auto it = built.find(id.index()); it != built.end()) return it->second;
    const auto &e = table_[id.index()];
    if (!e.node) throw ExtractionError("class " + std::to_string(id.index()) + " has no finite-cost term");
    if (std::find(on_path.begin(), on_path.end(), id.index()) != on_path.end()) {
      throw ExtractionError("cycle through class " + std::to_string(id.index()) + " in the extraction table");
    }
    on_path.push_back(id.index());
    std::vector<uint32_t> children;
    for (auto c : e.node->children) children.push_back(build(g_.find(c), out, built, on_path));
    on_path.pop_back();
    uint32_t idx = out.add(e.node->op, std::move(children));
    built.emplace(id.index(), idx);
    return idx;
  }

  const EGraph<A> &g_;
  K cost_;
  std::vector<Entry> table_;
  size_t sweeps_ = 1;
};

template <class A, CostFunction K = AstSize>
std::pair<Term, double> extract_best(const EGraph<A> &g, EClassId root, K cost = K{}) {
  Extractor<A, K> ex(g, std::move(cost));
  double c = ex.cost(root);
  if (c == std::numeric_limits<double>::infinity()) {
    throw ExtractionError("no finite-cost term represented in class " + std::to_string(g.find(root).index()));
  }
  return {ex.term(root), c};
}

/// Extraction phrased as an e-class analysis: each class carries its cheapest
/// e-node and that node's cost, and join keeps the cheaper one.
///
/// Data equality compares costs only: the stored e-node's children may be
/// stale ids after merges.
template <CostFunction K>
struct ExtractionAnalysis {
  struct Data {
    std::optional<double> cost;
    std::optional<ENode> node;

    friend bool operator==(const Data &a, const Data &b) { return a.cost == b.cost; }
  };

  K cost_fn{};

  Data make(const EGraph<ExtractionAnalysis> &g, const ENode &n) const {
    std::vector<double> child;
    child.reserve(n.children.size());
    for (auto c : n.children) {
      const auto &d = g[c].data;
      if (!d.cost) return Data{};
      child.push_back(*d.cost);
    }
    return Data{static_cast<double>(cost_fn(n.op, child)), n};
  }

  bool join(Data &into, Data from) const {
    if (!from.cost) return false;
    if (!into.cost || *from.cost < *into.cost) {
      into = std::move(from);
      return true;
    }
    if (*from.cost == *into.cost && from.node && into.node && *from.node < *into.node) into.node = std::move(from.node);
    return false;
  }

  void modify(EGraph<ExtractionAnalysis> &, EClassId) const {}

  static std::string format(const Data &d) { return d.cost ? std::to_string(*d.cost) : "inf"; }
};

}  // namespace eqsat
