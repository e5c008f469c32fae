#pragma once

#include <map>
#include <string>

#include "pathid/graph.hpp"

namespace pathid {

struct SplitNode {
  std::string random;  // keeps the incoming edges; addressed by the base name
  std::string fixed;   // inherits the outgoing directed edges
  std::string label;   // value label carried by the fixed half
};

struct Swig {
  Admg base;
  Admg graph;  // random halves and fixed halves
  std::map<std::string, SplitNode> split;
  // Labels of the fixed nodes that are ancestors of each random vertex.
  std::map<std::string, NameList> relabeling;
  VertexSet fixed;  // fixed halves, as indices of `graph`

  const std::string& fixed_node(const std::string& base_vertex) const;
};

// Intervention map: vertex -> value label.
Swig construct_swig(const Admg& g, const std::map<std::string, std::string>& interventions);

// Every path between x and y blocked by z; vertices in `always_blocked` block
// as non-colliders whether or not they are in z.
bool m_separated(const Admg& g, VertexSet x, VertexSet y, VertexSet z,
                 VertexSet always_blocked = {});
bool m_separated(const Admg& g, const NameList& x, const NameList& y, const NameList& z);

// Vertices are addressed by their names in s.graph: random halves by base
// name, fixed halves by s.fixed_node(base).
bool d_separated(const Swig& s, const NameList& x, const NameList& y, const NameList& z);

// Annotated text listing of the split graph, e.g. "M(a) | m".
std::string render_swig(const Swig& s);

}  // namespace pathid
