#pragma once

#include <string>
#include <unordered_map>

#include "eqsat/egraph.hpp"
#include "eqsat/extract.hpp"

namespace eqsat {

/// Checks that two clean e-graphs partition the same e-nodes into the same
/// classes, up to renaming of class ids. Each class of `a` is located in `b`
/// through one of its terms; the induced map must be a bijection that carries
/// every e-node of `a` to an e-node of the matching class in `b`.
template <class A, class B>
bool same_partition(const EGraph<A> &a, const EGraph<B> &b, std::string *why = nullptr) {
  auto fail = [&](std::string msg) {
    if (why) *why = std::move(msg);
    return false;
  };
  if (a.num_classes() != b.num_classes()) {
    return fail("class counts differ: " + std::to_string(a.num_classes()) + " vs " + std::to_string(b.num_classes()));
  }
  if (a.num_nodes() != b.num_nodes()) {
    return fail("e-node counts differ: " + std::to_string(a.num_nodes()) + " vs " + std::to_string(b.num_nodes()));
  }
  Extractor<A, AstSize> ex(a);
  std::unordered_map<EClassId, EClassId> to_b;
  std::unordered_map<EClassId, EClassId> to_a;
  for (auto id : a.class_ids()) {
    Term t = ex.term(id);
    auto found = b.lookup_term(t);
    if (!found) return fail("term " + print_term(t) + " is missing from the second graph");
    auto [it, fresh] = to_a.emplace(*found, id);
    if (!fresh) return fail("classes " + std::to_string(it->second.index()) + " and " + std::to_string(id.index()) +
                            " collapse in the second graph");
    to_b.emplace(id, *found);
  }
  std::string msg;
  bool ok = true;
  a.for_each_class([&](const typename EGraph<A>::Class &c) {
    if (!ok) return;
    for (const auto &n : c.nodes) {
      ENode m(n.op);
      for (auto ch : n.children) m.children.push_back(to_b.at(a.find(ch)));
      auto found = b.lookup(m);
      if (!found || *found != to_b.at(c.id)) {
        ok = false;
        msg = "e-node " + a.format_node(n) + " of class " + std::to_string(c.id.index()) + " is not mirrored";
        return;
      }
    }
  });
  return ok ? true : fail(msg);
}

}  // namespace eqsat
