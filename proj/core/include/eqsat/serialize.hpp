#pragma once

#include <string>
#include <vector>

#include "eqsat/egraph.hpp"

namespace eqsat {

/// Plain view of an e-graph for export: canonical classes with printed
/// e-nodes, plus the union-find as a find table.
struct EGraphSnapshot {
  struct Class {
    uint32_t id = 0;
    std::vector<std::string> nodes;
    std::string data;
  };
  std::vector<Class> classes;
  std::vector<uint32_t> find;
  bool clean = true;
};

template <class A>
EGraphSnapshot snapshot(const EGraph<A> &g) {
  EGraphSnapshot s;
  s.clean = g.is_clean();
  g.for_each_class([&](const typename EGraph<A>::Class &c) {
    EGraphSnapshot::Class out;
    out.id = c.id.index();
    for (const auto &n : c.nodes) out.nodes.push_back(g.format_node(n));
    out.data = format_data<A>(c.data);
    s.classes.push_back(std::move(out));
  });
  s.find.reserve(g.num_ids());
  for (uint32_t i = 0; i < g.num_ids(); ++i) s.find.push_back(g.find(EClassId(i)).index());
  return s;
}

/// JSON document `{clean, classes: [{id, nodes, data}], unionfind: [...]}`.
std::string to_json(const EGraphSnapshot &s, int indent = -1);

}  // namespace eqsat
