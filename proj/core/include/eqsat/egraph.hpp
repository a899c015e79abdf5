#pragma once

#include <algorithm>
#include <cassert>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "eqsat/analysis.hpp"
#include "eqsat/enode.hpp"
#include "eqsat/language.hpp"
#include "eqsat/union_find.hpp"

namespace eqsat {

/// When congruence is restored. Immediate emulates classic upward merging by
/// rebuilding at the end of every external merge.
enum class RebuildStrategy { Deferred, Immediate };

struct EGraphStats {
  uint64_t adds = 0;              // e-nodes that created a new class
  uint64_t unions = 0;            // productive merges, including upward merges
  uint64_t rebuilds = 0;          // rebuild invocations that had work to do
  uint64_t repairs = 0;           // calls to repair
  uint64_t hashcons_updates = 0;  // parent re-insertions performed by repair
};

template <class Data>
struct EClass {
  EClassId id;
  /// Sorted and deduplicated after each rebuild.
  std::vector<ENode> nodes;
  Data data;

  [[nodiscard]] size_t size() const { return nodes.size(); }
  /// Nodes with the given operator; the list is sorted by op when the graph is clean.
  [[nodiscard]] auto nodes_with(const Op &op) const {
    auto lo = std::lower_bound(nodes.begin(), nodes.end(), op, [](const ENode &n, const Op &o) { return n.op < o; });
    auto hi = std::upper_bound(lo, nodes.end(), op, [](const Op &o, const ENode &n) { return o < n.op; });
    return std::make_pair(lo, hi);
  }

 private:
  template <class>
  friend class EGraph;
  // indices into the e-graph's node table: every e-node with this class as a child
  std::vector<uint32_t> parents_;
};

/// E-graph (U, M, H) with deferred invariant maintenance.
///
/// `add` and `merge` may leave the congruence and hashcons invariants broken;
/// `rebuild` restores them together with the analysis invariant. Queries
/// such as e-matching and extraction require a clean graph.
template <class A = NoAnalysis>
class EGraph {
  static_assert(Analysis<A>, "EGraph requires an e-class analysis");

 public:
  using Data = typename A::Data;
  using Class = EClass<Data>;

  explicit EGraph(A analysis = A{}) : analysis_(std::move(analysis)) {}

  EGraph(const EGraph &other) { copy_from(other); }
  EGraph &operator=(const EGraph &other) {
    if (this != &other) copy_from(other);
    return *this;
  }
  EGraph(EGraph &&) noexcept = default;
  EGraph &operator=(EGraph &&) noexcept = default;

  [[nodiscard]] EClassId find(EClassId id) const { return unionfind_.find(id); }

  [[nodiscard]] ENode canonicalize(ENode node) const {
    for (auto &c : node.children) c = find(c);
    return node;
  }

  [[nodiscard]] std::optional<EClassId> lookup(const ENode &node) const {
    auto it = hashcons_.find(canonicalize(node));
    if (it == hashcons_.end()) return std::nullopt;
    return find(it->second);
  }

  /// Looks a ground term up without adding anything.
  [[nodiscard]] std::optional<EClassId> lookup_term(const Term &term) const {
    std::vector<EClassId> ids;
    ids.reserve(term.size());
    for (const auto &tn : term.nodes()) {
      ENode n(tn.op);
      for (auto c : tn.children) n.children.push_back(ids[c]);
      auto found = lookup(n);
      if (!found) return std::nullopt;
      ids.push_back(*found);
    }
    return ids.back();
  }

  EClassId add(ENode node) {
    for (auto &c : node.children) c = unionfind_.find_mut(c);
    if (auto it = hashcons_.find(node); it != hashcons_.end()) return unionfind_.find_mut(it->second);

    EClassId id = unionfind_.make_set();
    auto entry = static_cast<uint32_t>(table_.size());
    table_.push_back(NodeEntry{node, id, true});
    for (auto c : node.children) cls(c).parents_.push_back(entry);
    hashcons_.emplace(node, id);
    Data data = analysis_.make(*this, node);
    auto fresh = std::make_unique<Class>();
    fresh->id = id;
    fresh->nodes.push_back(std::move(node));
    fresh->data = std::move(data);
    classes_.push_back(std::move(fresh));
    ++node_count_;
    ++class_count_;
    ++stats_.adds;
    analysis_.modify(*this, id);
    return unionfind_.find_mut(id);
  }

  EClassId add_term(const Term &term) {
    std::vector<EClassId> ids;
    ids.reserve(term.size());
    for (const auto &tn : term.nodes()) {
      ENode n(tn.op);
      n.children.reserve(tn.children.size());
      for (auto c : tn.children) n.children.push_back(ids[c]);
      ids.push_back(add(std::move(n)));
    }
    return find(ids.back());
  }

  EClassId add_leaf(Op op) { return add(ENode(op)); }

  /// Unions two classes and queues the result for repair. Congruence is not
  /// restored here (unless the strategy is Immediate).
  EClassId merge(EClassId a, EClassId b) {
    a = unionfind_.find_mut(a);
    b = unionfind_.find_mut(b);
    if (a == b) return a;
    Class *ca = &cls(a);
    Class *cb = &cls(b);
    // leader is the class with more e-nodes, so the smaller list is moved
    if (cb->nodes.size() > ca->nodes.size() || (cb->nodes.size() == ca->nodes.size() && b < a)) {
      std::swap(a, b);
      std::swap(ca, cb);
    }
    // join before touching the structure: a contradiction leaves the graph intact
    Data from = cb->data;
    analysis_.join(ca->data, std::move(from));

    unionfind_.union_roots(a, b);
    ca->nodes.insert(ca->nodes.end(), std::make_move_iterator(cb->nodes.begin()),
                     std::make_move_iterator(cb->nodes.end()));
    ca->parents_.insert(ca->parents_.end(), cb->parents_.begin(), cb->parents_.end());
    classes_[b.index()].reset();
    --class_count_;

    worklist_.push_back(a);
    touched_.push_back(a);
    clean_ = false;
    ++stats_.unions;
    if (strategy_ == RebuildStrategy::Immediate && !rebuilding_) rebuild();
    return a;
  }

  /// Restores congruence, hashcons and analysis invariants by draining the
  /// worklist in canonicalized, deduplicated chunks.
  void rebuild() {
    if (rebuilding_) return;
    if (worklist_.empty() && touched_.empty()) {
      clean_ = true;
      return;
    }
    rebuilding_ = true;
    ++stats_.rebuilds;
    while (!worklist_.empty()) {
      std::vector<EClassId> todo;
      todo.swap(worklist_);
      for (auto &id : todo) id = unionfind_.find_mut(id);
      std::sort(todo.begin(), todo.end());
      todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
      for (auto id : todo) repair(id);
    }
    normalize_touched();
    rebuilding_ = false;
    clean_ = true;
  }

  [[nodiscard]] bool is_clean() const { return clean_ && worklist_.empty(); }

  [[nodiscard]] const Class &operator[](EClassId id) const { return *classes_[find(id).index()]; }

  [[nodiscard]] bool is_canonical(EClassId id) const { return find(id) == id; }

  /// Canonical class ids in ascending order.
  [[nodiscard]] std::vector<EClassId> class_ids() const {
    std::vector<EClassId> out;
    out.reserve(classes_.size());
    for (const auto &c : classes_) {
      if (c) out.push_back(c->id);
    }
    return out;
  }

  template <class F>
  void for_each_class(F &&f) const {
    for (const auto &c : classes_) {
      if (c) f(*c);
    }
  }

  [[nodiscard]] size_t num_classes() const { return class_count_; }
  /// Sum of class sizes; equals the number of distinct e-nodes once clean.
  [[nodiscard]] size_t num_nodes() const { return node_count_; }
  [[nodiscard]] size_t num_ids() const { return unionfind_.size(); }
  [[nodiscard]] size_t hashcons_size() const { return hashcons_.size(); }
  [[nodiscard]] size_t worklist_size() const { return worklist_.size(); }

  [[nodiscard]] const EGraphStats &stats() const { return stats_; }
  void reset_stats() { stats_ = {}; }

  [[nodiscard]] RebuildStrategy strategy() const { return strategy_; }
  void set_strategy(RebuildStrategy s) { strategy_ = s; }

  [[nodiscard]] const A &analysis() const { return analysis_; }

  /// Parent list of a class as (e-node, owning class) pairs, canonicalized.
  [[nodiscard]] std::vector<std::pair<ENode, EClassId>> parents(EClassId id) const {
    std::vector<std::pair<ENode, EClassId>> out;
    for (auto e : (*this)[id].parents_) {
      const auto &entry = table_[e];
      if (entry.live) out.emplace_back(canonicalize(entry.node), find(entry.eclass));
    }
    return out;
  }

  [[nodiscard]] const UnionFind &unionfind() const { return unionfind_; }

  /// Exhaustively checks the congruence, hashcons and analysis invariants.
  /// Returns one message per violation; empty iff the graph is clean.
  [[nodiscard]] std::vector<std::string> check_invariants() const;

  /// One line per canonical class: `<id>: {node, ...} data=<data>`.
  [[nodiscard]] std::string dump() const;

  [[nodiscard]] std::string format_node(const ENode &n) const {
    if (n.children.empty()) return to_string(n.op);
    std::string out = "(" + to_string(n.op);
    for (auto c : n.children) out += " #" + std::to_string(find(c).index());
    return out + ")";
  }

 private:
  struct NodeEntry {
    ENode node;  // equals this node's hashcons key while live
    EClassId eclass;
    bool live;
  };

  Class &cls(EClassId canonical) {
    assert(classes_[canonical.index()] && "class id must be canonical");
    return *classes_[canonical.index()];
  }

  void repair(EClassId id) {
    ++stats_.repairs;
    id = unionfind_.find_mut(id);
    std::vector<uint32_t> parents;
    parents.swap(cls(id).parents_);

    // hashcons fix-up: every parent's stale key is replaced by its canonical form
    for (auto e : parents) {
      NodeEntry &entry = table_[e];
      if (!entry.live) continue;
      hashcons_.erase(entry.node);
      for (auto &c : entry.node.children) c = unionfind_.find_mut(c);
      ++stats_.hashcons_updates;
      EClassId owner = unionfind_.find_mut(entry.eclass);
      auto [it, inserted] = hashcons_.try_emplace(entry.node, owner);
      if (!inserted) {
        // congruent to a node already present: upward merge and keep that one
        entry.live = false;
        merge(it->second, owner);
      }
    }

    // deduplicate the parent list
    std::vector<uint32_t> kept;
    kept.reserve(parents.size());
    for (auto e : parents) {
      if (table_[e].live) kept.push_back(e);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    for (auto e : kept) touched_.push_back(table_[e].eclass);

    EClassId leader = unionfind_.find_mut(id);
    auto &target = cls(leader).parents_;
    target.insert(target.end(), kept.begin(), kept.end());

    // analysis: modify once, then re-make parents and requeue the ones that changed
    analysis_.modify(*this, leader);
    for (auto e : kept) {
      EClassId pc = unionfind_.find_mut(table_[e].eclass);
      Data made = analysis_.make(*this, table_[e].node);
      if (analysis_.join(cls(pc).data, std::move(made))) worklist_.push_back(pc);
    }
  }

  void normalize_touched() {
    std::vector<EClassId> todo;
    todo.swap(touched_);
    for (auto &id : todo) id = unionfind_.find_mut(id);
    std::sort(todo.begin(), todo.end());
    todo.erase(std::unique(todo.begin(), todo.end()), todo.end());
    for (auto id : todo) {
      auto &nodes = cls(id).nodes;
      for (auto &n : nodes) {
        for (auto &c : n.children) c = unionfind_.find_mut(c);
      }
      std::sort(nodes.begin(), nodes.end());
      auto before = nodes.size();
      nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
      node_count_ -= before - nodes.size();
      // nodes moved in from a merged-away class still map to its old id
      for (const auto &n : nodes) {
        auto it = hashcons_.find(n);
        if (it != hashcons_.end() && it->second != id) {
          it->second = id;
          ++stats_.hashcons_updates;
        }
      }
    }
  }

  void copy_from(const EGraph &other) {
    analysis_ = other.analysis_;
    unionfind_ = other.unionfind_;
    classes_.clear();
    classes_.reserve(other.classes_.size());
    for (const auto &c : other.classes_) classes_.push_back(c ? std::make_unique<Class>(*c) : nullptr);
    hashcons_ = other.hashcons_;
    table_ = other.table_;
    worklist_ = other.worklist_;
    touched_ = other.touched_;
    node_count_ = other.node_count_;
    class_count_ = other.class_count_;
    stats_ = other.stats_;
    strategy_ = other.strategy_;
    clean_ = other.clean_;
    rebuilding_ = false;
  }

  A analysis_;
  UnionFind unionfind_;
  std::vector<std::unique_ptr<Class>> classes_;  // indexed by id; null once merged away
  std::unordered_map<ENode, EClassId, ENodeHash> hashcons_;
  std::vector<NodeEntry> table_;
  std::vector<EClassId> worklist_;
  std::vector<EClassId> touched_;  // classes whose node lists need canonicalizing
  size_t node_count_ = 0;
  size_t class_count_ = 0;
  EGraphStats stats_;
  RebuildStrategy strategy_ = RebuildStrategy::Deferred;
  bool clean_ = true;
  bool rebuilding_ = false;
};

template <class A>
std::vector<std::string> EGraph<A>::check_invariants() const {
  std::vector<std::string> out;
  auto cid = [](EClassId id) { return std::to_string(id.index()); };

  if (!is_clean()) out.push_back("graph is dirty: " + std::to_string(worklist_.size()) + " classes awaiting repair");

  // congruence: every pair of congruent e-nodes shares a class
  std::map<ENode, EClassId> seen;
  size_t total = 0;
  for_each_class([&](const Class &c) {
    if (find(c.id) != c.id) out.push_back("class " + cid(c.id) + " stored under a non-canonical id");
    for (const auto &n : c.nodes) {
      ++total;
      ENode canon = canonicalize(n);
      auto [it, fresh] = seen.emplace(canon, c.id);
      if (!fresh && find(it->second) != c.id) {
        out.push_back("congruence: " + format_node(canon) + " appears in classes " + cid(find(it->second)) + " and " +
                      cid(c.id));
      }
    }
  });

  // hashcons: maps exactly the canonical e-nodes to their canonical class
  for_each_class([&](const Class &c) {
    for (const auto &n : c.nodes) {
      if (canonicalize(n) != n) {
        out.push_back("class " + cid(c.id) + " holds non-canonical e-node " + format_node(n));
        continue;
      }
      auto it = hashcons_.find(n);
      if (it == hashcons_.end()) {
        out.push_back("hashcons: missing entry for " + format_node(n));
      } else if (it->second != c.id) {
        out.push_back("hashcons: " + format_node(n) + " maps to " + cid(it->second) + ", expected " + cid(c.id));
      }
    }
    if (!std::is_sorted(c.nodes.begin(), c.nodes.end()) ||
        std::adjacent_find(c.nodes.begin(), c.nodes.end()) != c.nodes.end()) {
      out.push_back("class " + cid(c.id) + " node list is not sorted and deduplicated");
    }
  });
  if (hashcons_.size() != seen.size()) {
    out.push_back("hashcons holds " + std::to_string(hashcons_.size()) + " entries for " +
                  std::to_string(seen.size()) + " distinct e-nodes");
  }
  if (total != node_count_) out.push_back("node counter out of sync");

  // parent lists cover every e-node that uses the class
  for_each_class([&](const Class &c) {
    for (const auto &n : c.nodes) {
      for (auto child : n.children) {
        bool listed = false;
        for (auto e : (*this)[child].parents_) {
          const auto &entry = table_[e];
          if (entry.live && canonicalize(entry.node) == canonicalize(n)) {
            listed = true;
            break;
          }
        }
        if (!listed) out.push_back("parent list of " + cid(find(child)) + " misses " + format_node(n));
      }
    }
  });

  // analysis: data is the join of make over the class, and modify is a fixpoint
  for_each_class([&](const Class &c) {
    if (c.nodes.empty()) return;
    Data joined = analysis_.make(*this, c.nodes.front());
    for (size_t i = 1; i < c.nodes.size(); ++i) analysis_.join(joined, analysis_.make(*this, c.nodes[i]));
    if (!(joined == c.data)) {
      out.push_back("analysis: class " + cid(c.id) + " holds " + format_data<A>(c.data) + ", join of make is " +
                    format_data<A>(joined));
    }
  });
  if (is_clean()) {
    EGraph probe(*this);
    auto adds = probe.stats_.adds;
    auto unions = probe.stats_.unions;
    for (auto id : class_ids()) probe.analysis_.modify(probe, id);
    if (probe.stats_.adds != adds || probe.stats_.unions != unions) {
      out.push_back("analysis: modify is not at a fixpoint");
    }
  }
  return out;
}

template <class A>
std::string EGraph<A>::dump() const {
  std::ostringstream os;
  for_each_class([&](const Class &c) {
    os << c.id.index() << ": {";
    for (size_t i = 0; i < c.nodes.size(); ++i) {
      if (i) os << ", ";
      os << format_node(c.nodes[i]);
    }
    os << "} data=" << format_data<A>(c.data) << "\n";
  });
  return os.str();
}

}  // namespace eqsat
