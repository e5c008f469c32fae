#include <doctest.h>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/paths.hpp"

using namespace pathid;
using testing::make_graph;

namespace {

PseQuery query(std::vector<Path> paths, NameList outcome = {"Y"}) {
  PseQuery q;
  q.outcome = std::move(outcome);
  q.treatments = {{"A", TreatmentValues{{"a", 1}, {"a'", 0}}}};
  q.paths = std::move(paths);
  return q;
}

}  // namespace

TEST_CASE("proper causal paths are enumerated shortest first") {
  const Admg& g = fixture_graph("amyl_a").base;
  auto paths = enumerate_proper_causal_paths(g, {"A"}, {"Y"});
  CHECK(paths == std::vector<Path>{{"A", "Y"},
                                   {"A", "L", "Y"},
                                   {"A", "M", "Y"},
                                   {"A", "L", "M", "Y"}});
  CHECK_THROWS_AS(enumerate_proper_causal_paths(g, {"A"}, {"A"}), OverlappingSets);
  // Paths may not revisit a treatment.
  Admg two = make_graph({"A", "B", "Y"}, {{"A", "B"}, {"B", "Y"}});
  CHECK(enumerate_proper_causal_paths(two, {"A", "B"}, {"Y"}) == std::vector<Path>{{"B", "Y"}});
}

TEST_CASE("queries are validated") {
  const Admg& g = fixture_graph("amyno_a").base;
  CHECK_THROWS_AS(validate_query(query({{"A", "M"}}), g), InvalidPath);
  CHECK_THROWS_AS(validate_query(query({{"M", "Y"}}), g), InvalidPath);
  CHECK_THROWS_AS(validate_query(query({{"A", "Z"}}), g), InvalidPath);
  CHECK_THROWS_AS(validate_query(query({{"A", "Y"}}, {"A"}), g), InvalidQuery);
  auto q = query({{"A", "Y"}});
  q.treatments[0].second.active.state = 2;
  CHECK_THROWS_AS(validate_query(q, g), InvalidQuery);
  CHECK_NOTHROW(validate_query(query({{"A", "M", "Y"}}), g));
}

TEST_CASE("edge assignment from a path set") {
  const Admg& g = fixture_graph("amyl_a").base;
  SUBCASE("direct path only") {
    auto e = assignment_from_paths(query({{"A", "Y"}}), g);
    CHECK(e.at({"A", "Y"}).label == "a");
    CHECK(e.at({"A", "L"}).label == "a'");
    CHECK(e.at({"A", "M"}).label == "a'");
  }
  SUBCASE("all paths through L") {
    auto e = assignment_from_paths(query({{"A", "L", "Y"}, {"A", "L", "M", "Y"}}), g);
    CHECK(e.at({"A", "L"}).label == "a");
    CHECK(e.at({"A", "Y"}).label == "a'");
  }
  SUBCASE("splitting the paths through L recants at L") {
    try {
      assignment_from_paths(query({{"A", "L", "Y"}}), g);
      FAIL("expected edge inconsistency");
    } catch (const EdgeInconsistent& e) {
      CHECK(e.witness() == "L");
      CHECK(e.all_witnesses() == NameList{"L"});
    }
  }
  SUBCASE("every path is always consistent") {
    auto e = assignment_from_paths(query(enumerate_proper_causal_paths(g, {"A"}, {"Y"})), g);
    for (const auto& [edge, value] : e) CHECK(value.label == "a");
  }
}

TEST_CASE("edge expansion gives every treatment edge its own component") {
  const Admg& g = fixture_graph("amyl_a").base;
  ExpandedGraph ex = edge_expand(g, {"A"});
  CHECK(ex.graph.size() == g.size() + 3);
  CHECK(ex.components() == NameList{"A_L", "A_M", "A_Y"});
  CHECK(ex.component_for("A", "M") == "A_M");
  CHECK(ex.graph.has_directed(ex.graph.index("A"), ex.graph.index("A_M")));
  CHECK_FALSE(ex.graph.has_directed(ex.graph.index("A"), ex.graph.index("M")));
  CHECK(ex.graph.has_directed(ex.graph.index("A_M"), ex.graph.index("M")));
  CHECK(ex.origin.at("A_L").children == NameList{"L"});

  // Matches the expanded fixture up to vertex order.
  const Admg& fixture = fixture_graph("edge_expanded").base;
  CHECK(fixture.size() == ex.graph.size());
  for (auto [a, b] : fixture.directed_edges()) {
    CHECK(ex.graph.has_directed(ex.graph.index(fixture.name(a)), ex.graph.index(fixture.name(b))));
  }
}

TEST_CASE("vertices reading two components of one treatment") {
  const Admg& g = fixture_graph("amyl_a").base;
  ExpandedGraph split = expand_custom(g, {{"A", {{"A_n", {"L", "M"}}, {"A_o", {"Y"}}}}});
  CHECK(split.origin.at("A_n").children == NameList{"L", "M"});
  CHECK(no_vertex_reads_conflicting_components(split, {{"A_n", 0}, {"A_o", 1}}));
  CHECK_THROWS_AS(no_vertex_reads_conflicting_components(split, {{"A_n", 0}}), InvalidQuery);

  // N and O both cause L, so L reads two components of A.
  const HiddenDag& c = fixture_graph("anomlpath_c");
  ExpandedGraph ex;
  ex.graph = c.base;
  ex.origin["N"] = Component{"A", {"M", "L"}};
  ex.origin["O"] = Component{"A", {"Y", "L"}};
  CHECK(no_vertex_reads_conflicting_components(ex, {{"N", 1}, {"O", 1}}));
  CHECK_FALSE(no_vertex_reads_conflicting_components(ex, {{"N", 0}, {"O", 1}}));
}

TEST_CASE("paths in the projection lift to the hidden DAG") {
  const HiddenDag& d = fixture_graph("pdewashup");
  auto lifted = lift_paths(d, query({{"A", "Y"}}));
  CHECK(lifted == std::vector<Path>{{"A", "S", "Y"}});
  CHECK(lift_paths(d, query({{"A", "M", "Y"}})) == std::vector<Path>{{"A", "M", "Y"}});
}
