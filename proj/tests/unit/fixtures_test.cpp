#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"

using namespace pathid;

TEST_CASE("fixture registry") {
  std::set<std::string> names;
  for (const auto& f : fixture_graphs()) {
    CHECK(names.insert(f.name).second);
    CHECK_FALSE(f.description.empty());
    for (const auto& v : f.graph.base.vertices()) CHECK(v.cardinality == 2);
  }
  CHECK(names.size() == 17);
  CHECK(fixture_graph("front_door").hidden_names() == NameList{"H"});
  CHECK(fixture_graph("torpedo").hidden_names() == NameList{"S", "U", "R"});
  CHECK_THROWS_AS(fixture_graph("nope"), Error);
}

TEST_CASE("River Blindness model") {
  auto theta = RiverBlindnessParams::generic();
  DiscreteNpsem m = river_blindness(theta);
  CHECK(m.graph() == fixture_graph("pdewashup"));
  JointTable law = observed_law(m);
  CHECK(is_distribution(law));
  CHECK(law.marginal({"A"})({1}) == theta.treatment);

  // p(Y(a,m)) = p(Y|a,m) for every a, m.
  for (int a = 0; a < 2; ++a) {
    for (int med = 0; med < 2; ++med) {
      CHECK(intervene(m, {{"A", a}, {"M", med}}, {"Y"})({1}) ==
            testing::cond(law, {{"Y", 1}}, {{"A", a}, {"M", med}}));
    }
  }

  // The treated mediator does not depend on U.
  CHECK(intervene(m, {{"A", 1}, {"U", 0}}, {"M"}) == intervene(m, {{"A", 1}, {"U", 1}}, {"M"}));

  auto bad = theta;
  bad.predisposition = 1;
  CHECK_THROWS_AS(river_blindness(bad), OutOfRange);
}

TEST_CASE("perturbation of the untreated mediator") {
  auto theta = RiverBlindnessParams::generic();
  Rational eps(1, 32);
  auto shifted = perturb(theta, eps);
  CHECK(shifted.mediator_untreated_u0 == theta.mediator_untreated_u0 + eps / (1 - theta.predisposition));
  CHECK(shifted.mediator_untreated_u1 == theta.mediator_untreated_u1 - eps / theta.predisposition);
  CHECK(shifted.outcome_suppressed_u0 == theta.outcome_suppressed_u0);
  CHECK(perturb(theta, 0) == theta);
  CHECK_THROWS_AS(perturb(theta, Rational(1, 2)), EpsilonTooLarge);
}
