#include <doctest.h>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/estimand.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/identify.hpp"

using namespace pathid;
using testing::cond;

namespace {

Binding at(const std::string& v, const std::string& label, int state) {
  return Binding{v, Value::constant(label, state)};
}

Estimand p(std::vector<Binding> t, std::vector<Binding> g = {}) { return Estimand::prob(t, g); }

// Mediation formula on A, M, Y written out by hand.
Estimand mediation_formula_estimand() {
  return Estimand::sum({"M"}, Estimand::product({p({free_binding("Y")}, {free_binding("M"), at("A", "a", 1)}),
                                                 p({free_binding("M")}, {at("A", "a'", 0)})}));
}

}  // namespace

TEST_CASE("a conditional probability term evaluates to the conditional") {
  std::mt19937_64 rng(1);
  JointTable t = testing::random_table({"A", "M", "Y"}, rng);
  Estimand e = p({at("Y", "y", 1)}, {at("M", "m", 0), at("A", "a", 1)});
  CHECK(evaluate(e, t) == cond(t, {{"Y", 1}}, {{"M", 0}, {"A", 1}}));
  Estimand free = p({free_binding("Y")}, {at("A", "a", 0)});
  CHECK(evaluate(free, t, {{"Y", 1}}) == cond(t, {{"Y", 1}}, {{"A", 0}}));
  CHECK_THROWS_AS(evaluate(free, t), MissingVariable);
}

TEST_CASE("mediation formula evaluates to the direct double sum") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 20; ++k) {
    JointTable t = testing::random_table({"A", "M", "Y"}, rng);
    Rational expected = 0;
    for (int m = 0; m < 2; ++m) expected += cond(t, {{"Y", 1}}, {{"M", m}, {"A", 1}}) * cond(t, {{"M", m}}, {{"A", 0}});
    CHECK(evaluate(mediation_formula_estimand(), t, {{"Y", 1}}) == expected);
    Table<double> d = evaluate_table(mediation_formula_estimand(), to_double(t), {"Y"});
    CHECK(d.at(1) == doctest::Approx(expected.get_d()).epsilon(1e-12));
  }
}

TEST_CASE("zero-probability conditioning is reported") {
  JointTable t({{"A", 2}, {"Y", 2}}, {Rational(1, 2), Rational(1, 2), 0, 0});
  CHECK_THROWS_AS(evaluate(p({at("Y", "y", 1)}, {at("A", "a", 1)}), t), ZeroConditioning);
}

TEST_CASE("simplify keeps the value") {
  std::mt19937_64 rng(3);
  const Admg& g = fixture_graph("amyl_a").base;
  Estimand raw = Estimand::sum(
      {"L", "M"},
      Estimand::product({Estimand::one(), p({free_binding("L")}, {at("A", "x", 0)}),
                         Estimand::product({p({free_binding("M")}, {free_binding("L"), at("A", "x", 0)}),
                                            p({free_binding("Y")},
                                              {free_binding("M"), free_binding("L"), at("A", "x*", 1)})})}));
  Estimand tidy = simplify(raw);
  Estimand canonical = canonicalize(tidy, topological_order(g));
  for (int k = 0; k < 10; ++k) {
    JointTable t = testing::random_table({"A", "L", "M", "Y"}, rng);
    auto base = evaluate_table(raw, t, {"Y"});
    CHECK(evaluate_table(tidy, t, {"Y"}) == base);
    CHECK(evaluate_table(canonical, t, {"Y"}) == base);
    CHECK(evaluate_table(merge_chains(tidy), t, {"Y"}) == base);
  }
  // Canonical form is a fixed point.
  CHECK(canonicalize(simplify(canonical), topological_order(g)) == canonical);
}

TEST_CASE("summing a conditional out of a chain leaves the marginal") {
  // sum_y p(y | a) = 1
  Estimand e = simplify(Estimand::sum({"Y"}, p({free_binding("Y")}, {at("A", "a", 1)})));
  CHECK(e.is_one());
}

TEST_CASE("free variables and substitution") {
  Estimand e = mediation_formula_estimand();
  CHECK(free_variables(e) == std::set<std::string>{"Y"});
  Estimand fixed = substitute(e, {{"Y", Value::constant("y", 1)}});
  CHECK(free_variables(fixed).empty());
  std::mt19937_64 rng(4);
  JointTable t = testing::random_table({"A", "M", "Y"}, rng);
  CHECK(evaluate(fixed, t) == evaluate(e, t, {{"Y", 1}}));
}

TEST_CASE("text, latex and structured rendering") {
  Estimand e = mediation_formula_estimand();
  CHECK(render(e, Format::Text) == "Σ_m p(Y|M=m,A=a)·p(M=m|A=a')");
  std::string latex = render(e, Format::Latex);
  CHECK(latex.find("\\sum") != std::string::npos);
  std::string structured = render(e, Format::Structured);
  CHECK(structured.rfind("pathid-estimand 1\n", 0) == 0);
  CHECK(parse_structured(structured) == e);
}

TEST_CASE("structured round trip over identified fixtures") {
  for (const auto& f : fixture_graphs()) {
    const Admg g = latent_project(f.graph);
    if (!g.contains("A") || !g.contains("Y")) continue;
    IdResult r = id(g, {{"A", {"a", 1}}}, {"Y"});
    if (!r.identified()) continue;
    CAPTURE(f.name);
    CHECK(parse_structured(render(r.estimand(), Format::Structured)) == r.estimand());
  }
  CHECK_THROWS_AS(parse_structured("pathid-estimand 1\nbogus\n"), ParseError);
  CHECK_THROWS_AS(parse_structured("not an estimand\n"), ParseError);
}
