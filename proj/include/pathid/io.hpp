#pragma once

#include <string>
#include <vector>

#include "pathid/estimand.hpp"
#include "pathid/graph.hpp"
#include "pathid/npsem.hpp"
#include "pathid/paths.hpp"
#include "pathid/table.hpp"

namespace pathid {

// Graph files:
//   vars: A M:3 Y H      every vertex in declaration order, ":k" if not binary
//   latent: H            optional hidden subset
//   edges:
//     A -> M
//     M <-> Y
// '#' starts a comment. All parsers throw ParseError carrying file and line.
HiddenDag parse_graph(const std::string& text, const std::string& file = "<graph>");
std::string serialize_graph(const HiddenDag& g);

enum class QueryKind { Interventional, PathSpecific, ConditionalPathSpecific, Separable, Bounds };

std::string to_string(QueryKind kind);

// A component vertex of a separable query: `component: A -> N x:0`.
struct SeparableComponent {
  std::string treatment;
  std::string vertex;
  ValueLabel value;
};

// Query files start with "pathid-query 1", followed by key/value lines:
//   kind: path_specific
//   outcome: Y
//   treatment: A active=a:1 baseline=a':0
//   path: A -> M -> Y           (repeatable)
//   given: C
//   mediator: M                 (bounds)
//   component: A -> N x:0       (separable, repeatable)
//   format: text|latex|structured
struct QueryFile {
  QueryKind kind = QueryKind::PathSpecific;
  NameList outcome;
  std::vector<std::pair<std::string, TreatmentValues>> treatments;
  std::vector<Path> paths;
  NameList given;
  std::string mediator;
  std::vector<SeparableComponent> components;
  Format format = Format::Text;

  PseQuery pse() const;
};

QueryFile parse_query(const std::string& text, const std::string& file = "<query>");
std::string serialize_query(const QueryFile& q);

// Model files start with "pathid-model 1":
//   mode: independent|joint
//   vars / latent / edges     as in graph files
//   noise V: p0 p1 ...        independent mode, one line per vertex
//   mechanism V:              one row per parent configuration:
//     0 1 : 0 0 1            parent states (declaration order) : output per noise state
//   joint: p0 p1 ...          joint mode, first vertex's noise most significant
DiscreteNpsem parse_model(const std::string& text, const std::string& file = "<model>");
std::string serialize_model(const DiscreteNpsem& m);

// Table files start with "pathid-table 1", then "vars:" and a "rows:" block
// of "states... probability" lines; omitted rows are zero.
JointTable parse_table(const std::string& text, const std::string& file = "<table>");
std::string serialize_table(const JointTable& t);

std::string read_file(const std::string& path);

}  // namespace pathid
