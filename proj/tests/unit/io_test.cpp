#include <doctest.h>

#include "helpers.hpp"
#include "pathid/errors.hpp"
#include "pathid/fixtures.hpp"
#include "pathid/io.hpp"

using namespace pathid;

TEST_CASE("graph files") {
  const std::string text =
      "# mediator with a hidden confounder\n"
      "vars: A M Y H C:3\n"
      "latent: H\n"
      "edges:\n"
      "  A -> M\n"
      "  M -> Y\n"
      "  H -> M\n"
      "  H -> Y\n"
      "  C -> Y\n"
      "  A <-> C\n";
  HiddenDag d = parse_graph(text);
  CHECK(d.base.size() == 5);
  CHECK(d.hidden_names() == NameList{"H"});
  CHECK(d.base.cardinality(d.base.index("C")) == 3);
  CHECK(d.base.has_bidirected(d.base.index("A"), d.base.index("C")));
  std::string canonical = serialize_graph(d);
  CHECK(parse_graph(canonical) == d);
  CHECK(serialize_graph(parse_graph(canonical)) == canonical);

  for (const auto& f : fixture_graphs()) {
    CAPTURE(f.name);
    CHECK(parse_graph(serialize_graph(f.graph)) == f.graph);
  }
}

TEST_CASE("malformed graph files name the line") {
  auto line_of = [](const std::string& text) {
    try {
      parse_graph(text, "g");
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("vars: A B\nedges:\n  A => B\n") == 3);
  CHECK(line_of("vars: A B\nedges:\n  A -> C\n") == 3);
  CHECK(line_of("vars: A B\nbogus: 1\n") == 2);
  CHECK(line_of("  A -> B\n") == 1);
  CHECK(line_of("vars: A B\nlatent: Q\n") == 2);
  CHECK_THROWS_AS(parse_graph("vars: A B\nedges:\n  A -> B\n  B -> A\n"), Error);
}

TEST_CASE("query files") {
  const std::string text =
      "pathid-query 1\n"
      "kind: conditional_path_specific\n"
      "outcome: Y\n"
      "treatment: A active=a:1 baseline=a':0\n"
      "path: A -> Y\n"
      "path: A -> L -> Y\n"
      "given: C\n"
      "format: latex\n";
  QueryFile q = parse_query(text);
  CHECK(q.kind == QueryKind::ConditionalPathSpecific);
  CHECK(q.paths.size() == 2);
  CHECK(q.given == NameList{"C"});
  CHECK(q.format == Format::Latex);
  CHECK(q.treatments[0].second.baseline == ValueLabel{"a'", 0});
  CHECK(serialize_query(q) == text);

  QueryFile interventional = parse_query("pathid-query 1\nkind: interventional\noutcome: Y\ntreatment: A active=a:1\n");
  CHECK(interventional.treatments[0].second.baseline == interventional.treatments[0].second.active);
  CHECK(serialize_query(interventional) ==
        "pathid-query 1\nkind: interventional\noutcome: Y\ntreatment: A active=a:1\nformat: text\n");

  CHECK_THROWS_AS(parse_query("kind: interventional\n"), ParseError);
  CHECK_THROWS_AS(parse_query("pathid-query 1\nkind: magic\n"), ParseError);
  CHECK_THROWS_AS(parse_query("pathid-query 1\nkind: path_specific\ntreatment: A active=a\n"), ParseError);
}

TEST_CASE("model files round-trip") {
  std::mt19937_64 rng(40);
  for (const auto& f : fixture_graphs()) {
    CAPTURE(f.name);
    DiscreteNpsem m = random_npsem(f.graph, rng);
    std::string text = serialize_model(m);
    DiscreteNpsem back = parse_model(text);
    CHECK(back == m);
    CHECK(serialize_model(back) == text);
  }
  DiscreteNpsem river = river_blindness(RiverBlindnessParams::generic());
  CHECK(parse_model(serialize_model(river)) == river);
}

TEST_CASE("joint-mode model files") {
  const std::string text =
      "pathid-model 1\n"
      "mode: joint\n"
      "vars: A Y\n"
      "edges:\n"
      "  A -> Y\n"
      "mechanism A:\n"
      "  : 0 1\n"
      "mechanism Y:\n"
      "  0 : 0 1\n"
      "  1 : 1 0\n"
      "joint:\n"
      "  1/2 0 0 1/2\n";
  DiscreteNpsem m = parse_model(text);
  CHECK(m.mode() == NoiseMode::Joint);
  CHECK(observed_law(m)({1, 0}) == Rational(1, 2));
  CHECK(serialize_model(m) == text);
  CHECK_THROWS_AS(parse_model("pathid-model 1\nmode: independent\nvars: A\nnoise A: 1/2 1/3\nmechanism A:\n  : 0 1\n"),
                  ParseError);
}

TEST_CASE("table files") {
  std::mt19937_64 rng(41);
  JointTable t = testing::random_table({"A", "M", "Y"}, rng);
  std::string text = serialize_table(t);
  CHECK(parse_table(text) == t);
  CHECK(serialize_table(parse_table(text)) == text);
  CHECK_THROWS_AS(parse_table("pathid-table 1\nvars: A\nrows:\n  0 1/2\n"), ParseError);
  CHECK_THROWS_AS(parse_table("pathid-table 1\nvars: A\nrows:\n  2 1\n"), ParseError);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("3/6") == Rational(1, 2));
  CHECK(parse_rational("0.25") == Rational(1, 4));
  CHECK(parse_rational("-1.5") == Rational(-3, 2));
  CHECK(parse_rational("2") == 2);
  CHECK(parse_rational("010/4") == Rational(5, 2));
  CHECK(parse_rational("0.05") == Rational(1, 20));
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("x"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK(ratio(2, 8) == Rational(1, 4));
}
