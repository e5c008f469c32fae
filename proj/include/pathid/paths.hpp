#pragma once

#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "pathid/graph.hpp"

namespace pathid {

// A named state of a vertex, e.g. "a'" meaning state 0.
struct ValueLabel {
  std::string label;
  int state = 0;
  friend bool operator==(const ValueLabel&, const ValueLabel&) = default;
};

struct TreatmentValues {
  ValueLabel active;
  ValueLabel baseline;
  friend bool operator==(const TreatmentValues&, const TreatmentValues&) = default;
};

using Path = NameList;

struct PseQuery {
  NameList outcome;
  std::vector<std::pair<std::string, TreatmentValues>> treatments;
  std::vector<Path> paths;  // the active path set
  NameList given;

  NameList treatment_names() const;
  const TreatmentValues& values_of(const std::string& treatment) const;
};

// Identifies the copy vertex inserted on the edge treatment -> child.
struct EdgeKey {
  std::string treatment;
  std::string child;
  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

using EdgeAssignment = std::map<EdgeKey, ValueLabel>;

struct Component {
  std::string treatment;
  NameList children;
  friend bool operator==(const Component&, const Component&) = default;
};

struct ExpandedGraph {
  Admg graph;
  VertexSet hidden;  // hidden vertices carried over from a HiddenDag input
  std::map<std::string, Component> origin;

  bool is_component(const std::string& name) const { return origin.count(name) > 0; }
  NameList components() const;  // in graph declaration order
  // The component of `treatment` that feeds `child`; throws if none or several.
  const std::string& component_for(const std::string& treatment, const std::string& child) const;
};

struct ComponentSpec {
  std::string name;
  NameList children;
};

using Decomposition = std::vector<std::pair<std::string, std::vector<ComponentSpec>>>;

// Validates outcome, treatments, given set and every path of q against g.
void validate_query(const PseQuery& q, const Admg& g);

// Directed paths from a vertex of `from` to a vertex of `to` whose vertices
// after the source avoid `from`. Ordered by length, then lexicographically by
// vertex index.
std::vector<std::vector<int>> proper_causal_paths(const Admg& g, VertexSet from, VertexSet to);
std::vector<Path> enumerate_proper_causal_paths(const Admg& g, const NameList& from,
                                                const NameList& to);

ExpandedGraph edge_expand(const Admg& g, const NameList& treatments);
ExpandedGraph edge_expand(const HiddenDag& d, const NameList& treatments);

// Throws EdgeInconsistent or InvalidPath.
EdgeAssignment assignment_from_paths(const PseQuery& q, const Admg& g);

ExpandedGraph expand_custom(const Admg& g, const Decomposition& decomposition);
ExpandedGraph expand_custom(const HiddenDag& d, const Decomposition& decomposition);

// True when no vertex has two components of one treatment set to different
// states. assignment maps component name -> state.
bool no_vertex_reads_conflicting_components(const ExpandedGraph& ex, const std::map<std::string, int>& assignment);

// Paths of the underlying hidden-variable graph whose observed subsequence is
// a path of q.paths.
std::vector<Path> lift_paths(const HiddenDag& d, const PseQuery& q);

std::string render_path(const Path& p);

}  // namespace pathid
