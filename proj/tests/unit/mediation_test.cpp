#include <doctest.h>

#include "helpers.hpp"
#include "pathid/cli.hpp"
#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/mediation.hpp"

using namespace pathid;
using testing::cond;
using testing::make_graph;

namespace {

BinaryMediationLaw law_with(Rational p_m1_baseline, Rational y0_active, Rational y1_active) {
  return BinaryMediationLaw{Rational(1, 2),
                            {p_m1_baseline, Rational(1, 3)},
                            {{{Rational(1, 4), Rational(3, 5)}, {y0_active, y1_active}}}};
}

// E[Y(a, M(a'))] - E[Y(a')] from a joint-mode model, through the cross-world opt-in.
Rational oracle_pde(const DiscreteNpsem& m) {
  PseQuery q;
  q.outcome = {"Y"};
  q.treatments = {{"A", TreatmentValues{{"a", 1}, {"a'", 0}}}};
  q.paths = {{"A", "Y"}};
  return testing::mean(pse_counterfactual(m, q, PseOptions{true}).marginal({"Y"})) -
         testing::mean(intervene(m, {{"A", 0}}, {"Y"}));
}

}  // namespace

TEST_CASE("mediation formula against a direct double sum") {
  std::mt19937_64 rng(30);
  for (int k = 0; k < 20; ++k) {
    JointTable t = testing::random_table({"A", "M", "Y"}, rng);
    Rational expected = 0;
    for (int m = 0; m < 2; ++m) {
      expected += (cond(t, {{"Y", 1}}, {{"A", 1}, {"M", m}}) - cond(t, {{"Y", 1}}, {{"A", 0}, {"M", m}})) *
                  cond(t, {{"M", m}}, {{"A", 0}});
    }
    CHECK(mediation_formula(t, 1, 0) == expected);
  }
  JointTable renamed({{"T", 2}, {"Z", 2}, {"O", 2}}, std::vector<Rational>(8, Rational(1, 8)));
  CHECK(mediation_formula(renamed, 1, 0, {"T", "Z", "O"}) == 0);
}

TEST_CASE("River Blindness laws agree before and after the perturbation") {
  auto theta = RiverBlindnessParams::generic();
  JointTable before = observed_law(river_blindness(theta));
  JointTable after = observed_law(river_blindness(perturb(theta, Rational(1, 32))));
  CHECK(before == after);
  CHECK(mediation_formula(before, 1, 0) == mediation_formula(after, 1, 0));
}

TEST_CASE("contrasts") {
  std::mt19937_64 rng(31);
  SUBCASE("no effect of the treatment") {
    HiddenDag d(make_graph({"A", "M", "Y"}, {{"A", "M"}, {"A", "Y"}, {"M", "Y"}}), {});
    DiscreteNpsem base = random_npsem(d, rng);
    auto mech = base.mechanisms();
    // Make M and Y ignore A: the rows for A=1 copy the rows for A=0.
    int n = mech[1].noise_states;
    for (int s = 0; s < n; ++s) mech[1].table[n + s] = mech[1].table[s];
    n = mech[2].noise_states;
    for (int row = 0; row < 2; ++row) {
      for (int s = 0; s < n; ++s) mech[2].table[(2 + row) * n + s] = mech[2].table[row * n + s];
    }
    MediationContrasts c = contrasts(DiscreteNpsem(d, mech), 1, 0);
    CHECK(c.ace == 0);
    CHECK(c.pde == 0);
    CHECK(c.tde == 0);
    CHECK(c.tie == 0);
    CHECK(c.pie == 0);
    for (const auto& v : c.cde) CHECK(v == 0);
  }
  SUBCASE("the direct effect on the triangle is identified") {
    for (int k = 0; k < 10; ++k) {
      DiscreteNpsem m = random_npsem(fixture_graph("amyno_a"), rng);
      MediationContrasts c = contrasts(m, 1, 0);
      CHECK(c.pde == mediation_formula(observed_law(m), 1, 0));
      CHECK(c.ace == c.pde + c.tie);
      CHECK(c.ace == c.tde + c.pie);
    }
  }
  SUBCASE("River Blindness direct effect differs from the mediation formula") {
    DiscreteNpsem m = river_blindness(RiverBlindnessParams::generic());
    CHECK(contrasts(m, 1, 0).pde != mediation_formula(observed_law(m), 1, 0));
  }
  SUBCASE("joint-mode models have no cross-world contrasts") {
    DiscreteNpsem m = coupled_model(law_with(Rational(1, 2), Rational(1, 2), Rational(1, 2)), 1,
                                    response_type_vertices(Rational(1, 2), Rational(1, 2), Rational(1, 2)).front());
    CHECK_THROWS_AS(contrasts(m, 1, 0), ModeMismatch);
  }
}

TEST_CASE("sharp bounds on the direct effect") {
  SUBCASE("intermediate bounds for one mediator stratum") {
    // p(M=0|a')=1/2 and p(Y=1|a,M=0)=9/10.
    PdeBounds b = pde_bounds(law_with(Rational(1, 2), Rational(9, 10), Rational(1, 5)).table(), 1, 0);
    CHECK(b.l0 == Rational(4, 5));
    CHECK(b.u0 == 1);
    // Gridding the joint cell p(M(a')=0, Y(a,0)=1) over its feasible range.
    Rational lo = 2, hi = -1;
    for (int k = 0; k <= 100; ++k) {
      Rational q = ratio(k, 100);
      Rational p0(1, 2), y0(9, 10);
      // Cells of the 2x2 coupling of M(a')=0 and Y(a,0)=1 must be nonnegative.
      if (q > p0 || q > y0 || p0 + y0 - q > 1) continue;
      lo = std::min(lo, Rational(q / p0));
      hi = std::max(hi, Rational(q / p0));
    }
    CHECK(lo == b.l0);
    CHECK(hi == b.u0);
  }
  SUBCASE("deterministic laws collapse the interval") {
    BinaryMediationLaw det{Rational(1, 2), {Rational(1, 2), Rational(1, 2)}, {{{0, 1}, {1, 0}}}};
    PdeBounds b = pde_bounds(det.table(), 1, 0);
    CHECK(b.lower == b.upper);
  }
  SUBCASE("oracle direct effects of extreme couplings span the interval") {
    BinaryMediationLaw law = law_with(Rational(3, 8), Rational(5, 8), Rational(1, 4));
    PdeBounds b = pde_bounds(law.table(), 1, 0);
    auto vertices = response_type_vertices(law.m1_given_a[0], law.y1_given_am[1][0], law.y1_given_am[1][1]);
    CHECK(vertices.size() >= 2);
    Rational lo = 2, hi = -2;
    for (const auto& v : vertices) {
      Rational total = 0;
      for (const auto& p : v) {
        CHECK(p >= 0);
        total += p;
      }
      CHECK(total == 1);
      DiscreteNpsem m = coupled_model(law, 1, v);
      CHECK(observed_law(m) == law.table());
      Rational pde = oracle_pde(m);
      lo = std::min(lo, pde);
      hi = std::max(hi, pde);
    }
    CHECK(lo == b.lower);
    CHECK(hi == b.upper);
  }
  SUBCASE("errors") {
    JointTable ternary({{"A", 2}, {"M", 3}, {"Y", 2}}, std::vector<Rational>(12, Rational(1, 12)));
    CHECK_THROWS_AS(pde_bounds(ternary, 1, 0), NotBinary);
    BinaryMediationLaw degenerate{Rational(1, 2), {0, Rational(1, 2)}, {{{0, 0}, {0, 0}}}};
    CHECK_THROWS_AS(pde_bounds(degenerate.table(), 1, 0), ZeroConditioning);
  }
}

TEST_CASE("separable effects") {
  const HiddenDag& d = fixture_graph("anomlpath_a");
  ExpandedGraph ex = separable_expansion(d, {{"A", "N", {"x", 0}}, {"A", "O", {"x*", 1}}});
  IdResult r = separable_query(ex, 0, {"Y"});
  REQUIRE(r.identified());
  CHECK(render(r.estimand(), Format::Text) == "Σ_{m,l} p(Y|M=m,L=l,A=x*)·p(M=m|L=l,A=x)·p(L=l|A=x)");

  ExpandedGraph conflicting =
      separable_expansion(fixture_graph("anomlpath_c"), {{"A", "N", {"x", 0}}, {"A", "O", {"x*", 1}}});
  IdResult c = separable_query(conflicting, 0, {"Y"});
  REQUIRE_FALSE(c.identified());
  CHECK(c.certificate().kind == NonIdentified::Kind::ConflictingComponents);
  CHECK(c.certificate().vertices == NameList{"L"});
  // Equal component values never conflict.
  CHECK(separable_query(conflicting, {{"N", {"x", 1}}, {"O", {"x", 1}}}, {"Y"}).identified());

  ExpandedGraph hidden = separable_expansion(fixture_graph("amyl_b"), {});
  CHECK_THROWS_AS(separable_query(hidden, 0, {"Y"}), InvalidQuery);
  CHECK_THROWS_AS(separable_query(ex, 2, {"Y"}), OutOfRange);
}
