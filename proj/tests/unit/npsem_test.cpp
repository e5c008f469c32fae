#include <doctest.h>

#include <cstdlib>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/npsem.hpp"

using namespace pathid;
using testing::make_graph;

namespace {

Mechanism uniform(int noise_states, std::vector<int> table) {
  return Mechanism{noise_states, std::vector<Rational>(noise_states, Rational(1, noise_states)),
                   std::move(table)};
}

// A = U_A, M = A and U_M, Y = M or U_Y, all noises fair coins.
DiscreteNpsem chain() {
  HiddenDag d(make_graph({"A", "M", "Y"}, {{"A", "M"}, {"M", "Y"}}), {});
  return DiscreteNpsem(d, {uniform(2, {0, 1}), uniform(2, {0, 0, 0, 1}), uniform(2, {0, 1, 1, 1})});
}

PseQuery query(std::vector<Path> paths, int active = 1, int baseline = 0) {
  PseQuery q;
  q.outcome = {"Y"};
  q.treatments = {{"A", TreatmentValues{{"a", active}, {"a'", baseline}}}};
  q.paths = std::move(paths);
  return q;
}

}  // namespace

TEST_CASE("observed law of a chain matches the hand factorization") {
  JointTable t = observed_law(chain());
  // p(A=1)=1/2, p(M=1|A=1)=1/2, p(M=1|A=0)=0, p(Y=1|M=0)=1/2, p(Y=1|M=1)=1.
  CHECK(t({0, 0, 0}) == Rational(1, 4));
  CHECK(t({0, 0, 1}) == Rational(1, 4));
  CHECK(t({0, 1, 0}) == 0);
  CHECK(t({0, 1, 1}) == 0);
  CHECK(t({1, 0, 0}) == Rational(1, 8));
  CHECK(t({1, 0, 1}) == Rational(1, 8));
  CHECK(t({1, 1, 0}) == 0);
  CHECK(t({1, 1, 1}) == Rational(1, 4));
  CHECK(is_distribution(t));
}

TEST_CASE("models are validated") {
  HiddenDag d(make_graph({"A"}, {}), {});
  CHECK_THROWS_AS(DiscreteNpsem(d, {Mechanism{2, {Rational(1, 2), Rational(1, 3)}, {0, 1}}}), InvalidGraph);
  CHECK_THROWS_AS(DiscreteNpsem(d, {Mechanism{2, {Rational(1, 2), Rational(1, 2)}, {0, 2}}}), InvalidGraph);
  CHECK_THROWS_AS(DiscreteNpsem(d, {Mechanism{2, {Rational(1, 2), Rational(1, 2)}, {0}}}), InvalidGraph);
  CHECK_THROWS_AS(DiscreteNpsem(HiddenDag(make_graph({"A", "B"}, {}, {{"A", "B"}}), {}),
                                {uniform(2, {0, 1}), uniform(2, {0, 1})}),
                  InvalidGraph);
}

TEST_CASE("interventions") {
  DiscreteNpsem m = chain();
  JointTable y = intervene(m, {{"M", 1}}, {"Y"});
  CHECK(y({1}) == 1);
  // Intervening downstream of every target leaves the marginal alone.
  CHECK(intervene(m, {{"Y", 0}}, {"A", "M"}) == observed_law(m).marginal({"A", "M"}));
  CHECK_THROWS_AS(intervene(m, {{"Z", 0}}, {"Y"}), UnknownVertex);
  CHECK_THROWS_AS(intervene(m, {{"A", 2}}, {"Y"}), OutOfRange);

  std::mt19937_64 rng(20);
  for (const auto& f : fixture_graphs()) {
    if (!f.graph.base.contains("A") || !f.graph.base.contains("Y")) continue;
    CAPTURE(f.name);
    DiscreteNpsem r = random_npsem(f.graph, rng, 2);
    CHECK(intervene(r, {{"A", 1}}, {"Y"}) == testing::brute_force(r, {{"A", 1}}, {"Y"}));
    CHECK(observed_law(r).marginal({"Y"}) == testing::brute_force(r, {}, {"Y"}));
  }
}

TEST_CASE("path-specific counterfactuals") {
  std::mt19937_64 rng(21);
  const HiddenDag& d = fixture_graph("amyl_a");
  DiscreteNpsem m = random_npsem(d, rng);
  auto all = enumerate_proper_causal_paths(d.base, {"A"}, {"Y"});
  SUBCASE("every path active equals the intervention at the active value") {
    CHECK(pse_counterfactual(m, query(all)).marginal({"Y"}) == intervene(m, {{"A", 1}}, {"Y"}));
  }
  SUBCASE("no path active equals the intervention at the baseline value") {
    CHECK(pse_counterfactual(m, query({})).marginal({"Y"}) == intervene(m, {{"A", 0}}, {"Y"}));
  }
  SUBCASE("equal values ignore the path set") {
    CHECK(pse_counterfactual(m, query({{"A", "Y"}}, 1, 1)).marginal({"Y"}) == intervene(m, {{"A", 1}}, {"Y"}));
  }
  SUBCASE("direct effect on the triangle is the mediation formula") {
    DiscreteNpsem t = random_npsem(fixture_graph("amyno_a"), rng);
    JointTable law = observed_law(t);
    Rational expected = 0;
    for (int med = 0; med < 2; ++med) {
      expected += testing::cond(law, {{"Y", 1}}, {{"A", 1}, {"M", med}}) * testing::cond(law, {{"M", med}}, {{"A", 0}});
    }
    CHECK(pse_counterfactual(t, query({{"A", "Y"}})).marginal({"Y"})({1}) == expected);
  }
  CHECK_THROWS_AS(pse_counterfactual(m, query({{"A", "Q"}})), InvalidPath);
}

TEST_CASE("enumeration cap") {
  setenv("PATHID_ENUM_CAP", "4", 1);
  CHECK(enumeration_cap() == 4);
  CHECK_THROWS_AS(observed_law(chain()), EnumerationLimit);
  unsetenv("PATHID_ENUM_CAP");
  CHECK(enumeration_cap() == 10000000);
  CHECK_NOTHROW(observed_law(chain()));
}

TEST_CASE("joint-mode models") {
  HiddenDag d(make_graph({"A", "Y"}, {{"A", "Y"}}), {});
  // Noise of A and of Y perfectly correlated.
  std::vector<Mechanism> mech{Mechanism{2, {}, {0, 1}}, Mechanism{2, {}, {0, 1, 1, 0}}};
  DiscreteNpsem m(d, mech, NoiseMode::Joint, {Rational(1, 2), 0, 0, Rational(1, 2)});
  JointTable law = observed_law(m);
  CHECK(law({0, 0}) == Rational(1, 2));
  CHECK(law({1, 0}) == Rational(1, 2));
  CHECK(intervene(m, {{"A", 1}}, {"Y"})({1}) == Rational(1, 2));
  // Single-world queries are fine, cross-world ones need an explicit opt-in.
  CHECK_NOTHROW(pse_counterfactual(m, query({{"A", "Y"}}, 1, 1)));
  CHECK_THROWS_AS(cross_world_table(m, {{"Y", {{"A", 0}}}, {"Y", {{"A", 1}}}}), ModeMismatch);
  CHECK_NOTHROW(cross_world_table(m, {{"Y", {{"A", 0}}}, {"A", {{"A", 0}}}}));
  CHECK_THROWS_AS(DiscreteNpsem(d, mech, NoiseMode::Joint, {Rational(1)}), InvalidGraph);
}

TEST_CASE("cross-world laws") {
  std::mt19937_64 rng(22);
  DiscreteNpsem m = random_npsem(fixture_graph("amyno_a"), rng);
  CounterfactualVar m0{"M", {{"A", 0}}};
  CHECK(m0.name() == "M(A=0)");
  SUBCASE("independence across worlds in an NPSEM-IE without confounding") {
    for (int med = 0; med < 2; ++med) {
      JointTable t = cross_world_table(m, {{"Y", {{"A", 1}, {"M", med}}}, m0});
      JointTable y = t.marginal({t.variables()[0].name});
      JointTable mm = t.marginal({"M(A=0)"});
      for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) CHECK(t({a, b}) == y({a}) * mm({b}));
      }
    }
  }
  SUBCASE("River Blindness: M(a=0) and Y(a=1,m) are dependent") {
    DiscreteNpsem river = river_blindness(RiverBlindnessParams::generic());
    JointTable t = cross_world_table(river, {{"M", {{"A", 0}}}, {"Y", {{"A", 1}, {"M", 1}}}});
    Rational joint = t({1, 1});
    Rational product = t.marginal({t.variables()[0].name})({1}) * t.marginal({t.variables()[1].name})({1});
    CHECK(joint != product);
  }
  SUBCASE("a deterministic model gives a point mass") {
    HiddenDag d(make_graph({"A", "Y"}, {{"A", "Y"}}), {});
    DiscreteNpsem det(d, {uniform(1, {1}), uniform(1, {1, 0})});
    JointTable t = cross_world_table(det, {{"Y", {{"A", 0}}}, {"Y", {{"A", 1}}}});
    CHECK(t({1, 0}) == 1);
  }
}

TEST_CASE("expanded graph counterfactuals agree with the path-specific recursion") {
  std::mt19937_64 rng(23);
  const HiddenDag& d = fixture_graph("amyl_a");
  DiscreteNpsem m = random_npsem(d, rng);
  ExpandedGraph ex = edge_expand(d, {"A"});
  SUBCASE("constant assignment is the intervention") {
    auto r = expanded_counterfactual(m, ex, {{"A_L", 1}, {"A_M", 1}, {"A_Y", 1}});
    CHECK(r.table.marginal({"Y"}) == intervene(m, {{"A", 1}}, {"Y"}));
    CHECK_FALSE(r.compared);
  }
  SUBCASE("each edge-consistent path set") {
    auto q = query({{"A", "Y"}, {"A", "L", "Y"}, {"A", "L", "M", "Y"}});
    auto states = component_states(m, ex, q);
    CHECK(states == ComponentStates{{"A_L", 1}, {"A_M", 0}, {"A_Y", 1}});
    auto r = expanded_counterfactual(m, ex, states, &q);
    CHECK(r.pointwise_equal());
    CHECK(r.configurations > 0);
    CHECK(r.table == pse_counterfactual(m, q));
  }
  SUBCASE("two components split the triangle") {
    const Admg& g = fixture_graph("amyno_a").base;
    DiscreteNpsem t = random_npsem(fixture_graph("amyno_a"), rng);
    ExpandedGraph split = expand_custom(g, {{"A", {{"A_n", {"M"}}, {"A_o", {"Y"}}}}});
    auto q = query({{"A", "Y"}});
    auto r = expanded_counterfactual(t, split, {{"A_n", 0}, {"A_o", 1}}, &q);
    CHECK(r.pointwise_equal());
  }
  SUBCASE("missing and uncovered components") {
    CHECK_THROWS_AS(expanded_counterfactual(m, ex, {{"A_L", 1}, {"A_M", 1}}), InvalidQuery);
    ExpandedGraph partial = ex;
    partial.origin.erase("A_Y");
    CHECK_THROWS_AS(expanded_counterfactual(m, partial, {{"A_L", 1}, {"A_M", 1}}), UncoveredChild);
  }
}

TEST_CASE("random models are reproducible and full-range") {
  std::mt19937_64 a(5), b(5);
  const HiddenDag& d = fixture_graph("amyl_a");
  CHECK(random_npsem(d, a) == random_npsem(d, b));
  std::mt19937_64 rng(6);
  DiscreteNpsem m = random_npsem(d, rng, 3);
  for (int v = 0; v < d.base.size(); ++v) {
    CHECK(m.mechanism(v).noise_states == 3);
    Rational total = 0;
    for (const auto& p : m.mechanism(v).pmf) {
      CHECK(p > 0);
      total += p;
    }
    CHECK(total == 1);
  }
  CHECK_THROWS_AS(random_npsem(d, rng, 1), InvalidGraph);
}
