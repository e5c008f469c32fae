#include <doctest.h>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/graph.hpp"
#include "pathid/swig.hpp"

using namespace pathid;
using testing::make_graph;

TEST_CASE("topological order breaks ties by declaration order") {
  Admg g = make_graph({"Y", "B", "A", "C"}, {{"A", "Y"}, {"B", "Y"}, {"C", "B"}});
  CHECK(topological_order(g) == NameList{"A", "C", "B", "Y"});
  auto rank = topological_rank(g);
  CHECK(rank[g.index("Y")] == 3);
}

TEST_CASE("cycles and malformed graphs are rejected") {
  CHECK_THROWS_AS(make_graph({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}, {"C", "A"}}), CycleDetected);
  try {
    make_graph({"A", "B"}, {{"A", "B"}, {"B", "A"}});
    FAIL("expected a cycle");
  } catch (const CycleDetected& e) {
    CHECK(e.cycle().size() >= 2);
  }
  CHECK_THROWS_AS(make_graph({"A"}, {{"A", "A"}}), InvalidGraph);
  CHECK_THROWS_AS(make_graph({"A", "A"}, {}), InvalidGraph);
  CHECK_THROWS_AS(make_graph({"A"}, {{"A", "B"}}), UnknownVertex);
}

TEST_CASE("ancestors, descendants and districts") {
  Admg g = make_graph({"A", "M", "L", "Y"}, {{"A", "M"}, {"M", "Y"}, {"L", "Y"}}, {{"M", "L"}, {"A", "Y"}});
  CHECK(ancestors(g, NameList{"Y"}) == NameList{"A", "M", "L", "Y"});
  CHECK(ancestors(g, NameList{"M"}) == NameList{"A", "M"});
  CHECK(descendants(g, NameList{"A"}) == NameList{"A", "M", "Y"});
  CHECK(parents(g, NameList{"Y"}) == NameList{"M", "L"});
  CHECK(children(g, NameList{"A"}) == NameList{"M"});
  auto d = districts(g, NameList{"A", "M", "L", "Y"});
  REQUIRE(d.size() == 2);
  CHECK(d[0] == NameList{"A", "Y"});
  CHECK(d[1] == NameList{"M", "L"});
  // Districts are taken within the induced subgraph.
  CHECK(districts(g, NameList{"A", "M"}).size() == 2);
}

TEST_CASE("latent projection") {
  SUBCASE("hidden common cause becomes a bidirected edge") {
    HiddenDag d(make_graph({"A", "Y", "H"}, {{"H", "A"}, {"H", "Y"}, {"A", "Y"}}), {"H"});
    Admg p = latent_project(d);
    CHECK(p.size() == 2);
    CHECK(p.has_directed(p.index("A"), p.index("Y")));
    CHECK(p.has_bidirected(p.index("A"), p.index("Y")));
  }
  SUBCASE("hidden mediator becomes a directed edge") {
    HiddenDag d(make_graph({"A", "S", "Y"}, {{"A", "S"}, {"S", "Y"}}), {"S"});
    Admg p = latent_project(d);
    CHECK(p.has_directed(p.index("A"), p.index("Y")));
    CHECK_FALSE(p.has_bidirected_edges());
  }
  SUBCASE("hidden chains: the source confounds, the end does not") {
    // H1 -> H2 -> Y, H1 -> M: M <-> Y.
    HiddenDag d(make_graph({"M", "Y", "H1", "H2"}, {{"H1", "H2"}, {"H2", "Y"}, {"H1", "M"}}), {"H1", "H2"});
    Admg p = latent_project(d);
    CHECK(p.has_bidirected(p.index("M"), p.index("Y")));
    CHECK_FALSE(p.has_directed(p.index("M"), p.index("Y")));
  }
  SUBCASE("no hidden vertices leaves the graph unchanged") {
    Admg g = make_graph({"A", "B"}, {{"A", "B"}});
    CHECK(latent_project(HiddenDag(g, {})) == g);
  }
}

TEST_CASE("m-separation") {
  Admg chain = make_graph({"A", "M", "Y"}, {{"A", "M"}, {"M", "Y"}});
  CHECK_FALSE(m_separated(chain, {"A"}, {"Y"}, {}));
  CHECK(m_separated(chain, {"A"}, {"Y"}, {"M"}));
  Admg collider = make_graph({"A", "C", "Y"}, {{"A", "C"}, {"Y", "C"}});
  CHECK(m_separated(collider, {"A"}, {"Y"}, {}));
  CHECK_FALSE(m_separated(collider, {"A"}, {"Y"}, {"C"}));
  Admg bow = make_graph({"A", "M", "Y"}, {{"A", "M"}}, {{"M", "Y"}});
  CHECK_FALSE(m_separated(bow, {"A"}, {"Y"}, {"M"}));
  CHECK(m_separated(bow, {"A"}, {"Y"}, {}));
  CHECK_THROWS_AS(m_separated(chain, {"A"}, {"A"}, {}), OverlappingSets);
}

TEST_CASE("single world intervention graph splits intervened vertices") {
  Admg g = make_graph({"A", "L", "M", "Y"},
                      {{"A", "L"}, {"A", "M"}, {"A", "Y"}, {"L", "M"}, {"L", "Y"}, {"M", "Y"}});
  Swig s = construct_swig(g, {{"A", "a"}});
  const std::string& fixed = s.fixed_node("A");
  int f = s.graph.index(fixed);
  int a = s.graph.index("A");
  CHECK(s.graph.children(a).empty());
  CHECK(s.graph.children(f) == s.graph.set_of({"L", "M", "Y"}));
  CHECK(s.relabeling.at("Y") == NameList{"a"});
  CHECK(s.relabeling.at("A").empty());
  // The random half of A is independent of Y(a) in the absence of confounding.
  CHECK(d_separated(s, {"A"}, {"Y"}, {}));
  Admg confounded = make_graph({"A", "Y"}, {{"A", "Y"}}, {{"A", "Y"}});
  CHECK_FALSE(d_separated(construct_swig(confounded, {{"A", "a"}}), {"A"}, {"Y"}, {}));
  CHECK_THROWS_AS(construct_swig(g, {{"Z", "z"}}), UnknownVertex);
}
