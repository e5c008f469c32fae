#include "pathid/fixtures.hpp"

#include "pathid/errors.hpp"

namespace pathid {

namespace {

HiddenDag dag(const NameList& vertices, const std::vector<Edge>& edges, const NameList& hidden = {}) {
  std::vector<Vertex> vs;
  for (const auto& v : vertices) vs.push_back({v, 2});
  return HiddenDag(Admg(std::move(vs), edges), hidden);
}

std::vector<GraphFixture> build_registry() {
  const std::vector<Edge> treatment_to_components{{"A", "N"}, {"A", "O"}};
  auto with_components = [&](std::vector<Edge> edges) {
    edges.insert(edges.begin(), treatment_to_components.begin(), treatment_to_components.end());
    return edges;
  };
  return {
      {"amyno_a", dag({"A", "M", "Y"}, {{"A", "M"}, {"A", "Y"}, {"M", "Y"}}),
       "treatment, mediator, outcome triangle"},
      {"amyno_b",
       dag({"A", "N", "O", "M", "Y"},
           with_components({{"N", "M"}, {"O", "Y"}, {"M", "Y"}, {"N", "Y"}, {"O", "M"}})),
       "treatment split into N and O, both reaching M and Y"},
      {"amyno_c", dag({"A", "N", "O", "M", "Y"}, with_components({{"N", "M"}, {"O", "Y"}, {"M", "Y"}})),
       "treatment split into N -> M and O -> Y"},
      {"amyno_d", dag({"A", "N", "M", "Y"}, {{"A", "N"}, {"N", "M"}, {"A", "Y"}, {"M", "Y"}}),
       "N acts only through M"},
      {"amyno_e", dag({"A", "O", "M", "Y"}, {{"A", "O"}, {"A", "M"}, {"O", "Y"}, {"M", "Y"}}),
       "O acts only directly on Y"},
      {"amyl_a",
       dag({"A", "L", "M", "Y"},
           {{"A", "M"}, {"M", "Y"}, {"A", "Y"}, {"A", "L"}, {"L", "M"}, {"L", "Y"}}),
       "mediator M with a treatment-dependent confounder L"},
      {"amyl_b",
       dag({"A", "M", "Y", "H"}, {{"A", "M"}, {"M", "Y"}, {"A", "Y"}, {"H", "M"}, {"H", "Y"}},
           {"H"}),
       "mediator-outcome confounding by hidden H"},
      {"anomlpath_a",
       dag({"A", "N", "O", "L", "M", "Y"},
           with_components({{"N", "M"}, {"N", "L"}, {"O", "Y"}, {"M", "Y"}, {"L", "M"}, {"L", "Y"}})),
       "L depends on N only"},
      {"anomlpath_b",
       dag({"A", "N", "O", "L", "M", "Y"},
           with_components({{"N", "M"}, {"O", "L"}, {"O", "Y"}, {"M", "Y"}, {"L", "M"}, {"L", "Y"}})),
       "L depends on O only"},
      {"anomlpath_c",
       dag({"A", "N", "O", "L", "M", "Y"},
           with_components({{"N", "M"}, {"N", "L"}, {"O", "L"}, {"O", "Y"}, {"M", "Y"}, {"L", "M"},
                            {"L", "Y"}})),
       "L depends on both N and O"},
      {"edge_expanded",
       dag({"A", "A_L", "A_M", "A_Y", "L", "M", "Y"},
           {{"A", "A_L"}, {"A", "A_M"}, {"A", "A_Y"}, {"A_L", "L"}, {"A_M", "M"}, {"A_Y", "Y"},
            {"L", "M"}, {"L", "Y"}, {"M", "Y"}}),
       "edge expansion of amyl_a"},
      {"ex_po_calc_a",
       dag({"C", "A", "M", "Y", "H1", "H2"},
           {{"C", "A"}, {"A", "M"}, {"M", "Y"}, {"A", "Y"}, {"H1", "C"}, {"H1", "M"}, {"H2", "C"},
            {"H2", "Y"}},
           {"H1", "H2"}),
       "baseline covariate C confounded with M and with Y"},
      {"ex_po_calc_b",
       dag({"C", "A", "M", "Y", "H2"},
           {{"C", "A"}, {"A", "M"}, {"M", "Y"}, {"C", "M"}, {"A", "Y"}, {"H2", "C"}, {"H2", "Y"}},
           {"H2"}),
       "covariate C causes M and is confounded with Y"},
      {"torpedo",
       dag({"A", "S", "M", "U", "R", "Y"},
           {{"A", "S"}, {"A", "M"}, {"S", "R"}, {"M", "R"}, {"M", "Y"}, {"R", "Y"}, {"U", "R"},
            {"U", "M"}},
           {"U", "S", "R"}),
       "River Blindness trial with clinic S and immune response R hidden"},
      {"pdewashup",
       dag({"U", "A", "S", "M", "Y"},
           {{"U", "M"}, {"U", "Y"}, {"A", "S"}, {"A", "M"}, {"S", "Y"}, {"M", "Y"}}, {"U", "S"}),
       "River Blindness model with R marginalized"},
      {"back_door", dag({"C", "A", "Y"}, {{"C", "A"}, {"C", "Y"}, {"A", "Y"}}),
       "measured confounder C"},
      {"front_door",
       dag({"A", "M", "Y", "H"}, {{"A", "M"}, {"M", "Y"}, {"H", "A"}, {"H", "Y"}}, {"H"}),
       "hidden treatment-outcome confounder, full mediator M"},
  };
}

void check_open_unit(const Rational& v, const char* name) {
  if (v <= 0 || v >= 1) throw OutOfRange(std::string(name) + " must lie strictly between 0 and 1");
}

}  // namespace

const std::vector<GraphFixture>& fixture_graphs() {
  static const std::vector<GraphFixture> registry = build_registry();
  return registry;
}

const HiddenDag& fixture_graph(std::string_view name) {
  for (const auto& f : fixture_graphs()) {
    if (f.name == name) return f.graph;
  }
  throw Error("no fixture graph named '" + std::string(name) + "'");
}

RiverBlindnessParams RiverBlindnessParams::generic() {
  return {Rational(5, 16),  Rational(7, 16), Rational(3, 16), Rational(11, 16), Rational(9, 16),
          Rational(13, 16), Rational(1, 8),  Rational(3, 8),  Rational(5, 8),   Rational(15, 16)};
}

DiscreteNpsem river_blindness(const RiverBlindnessParams& p) {
  check_open_unit(p.predisposition, "p(U=1)");
  check_open_unit(p.treatment, "p(A=1)");
  check_open_unit(p.mediator_untreated_u0, "p(M(a0,u0)=1)");
  check_open_unit(p.mediator_untreated_u1, "p(M(a0,u1)=1)");
  check_open_unit(p.mediator_treated, "p(M(a1)=1)");
  check_open_unit(p.outcome_suppressed_u0, "p(Y(m1,s1,u0)=1)");
  check_open_unit(p.outcome_suppressed_u1, "p(Y(m1,s1,u1)=1)");
  check_open_unit(p.outcome_m0_s0, "p(Y(m0,s0)=1)");
  check_open_unit(p.outcome_m0_s1, "p(Y(m0,s1)=1)");
  check_open_unit(p.outcome_m1_s0, "p(Y(m1,s0)=1)");

  // Noise of M and Y is a vector of independent Bernoulli bits, one per
  // response probability; the mechanism reads the bit its parents select.
  auto bit_vector_pmf = [](const std::vector<Rational>& probs) {
    const int k = static_cast<int>(probs.size());
    std::vector<Rational> pmf(1 << k);
    for (int s = 0; s < (1 << k); ++s) {
      Rational w = 1;
      for (int b = 0; b < k; ++b) w *= (s >> b & 1) ? probs[b] : Rational(1 - probs[b]);
      pmf[s] = w;
    }
    return pmf;
  };

  const HiddenDag& g = fixture_graph("pdewashup");
  std::vector<Mechanism> mech(5);
  mech[0] = Mechanism{2, {1 - p.predisposition, p.predisposition}, {0, 1}};  // U
  mech[1] = Mechanism{2, {1 - p.treatment, p.treatment}, {0, 1}};           // A
  mech[2] = Mechanism{1, {Rational(1)}, {0, 1}};                            // S = A

  // M: parents (U, A); bits 0,1,2 = M(a0,u0), M(a0,u1), M(a1).
  mech[3].noise_states = 8;
  mech[3].pmf = bit_vector_pmf({p.mediator_untreated_u0, p.mediator_untreated_u1, p.mediator_treated});
  for (int u = 0; u < 2; ++u) {
    for (int a = 0; a < 2; ++a) {
      int bit = a == 1 ? 2 : u;
      for (int s = 0; s < 8; ++s) mech[3].table.push_back(s >> bit & 1);
    }
  }

  // Y: parents (U, S, M); bits 0..4 = Y(m1,s1,u0), Y(m1,s1,u1), Y(m0,s0),
  // Y(m0,s1), Y(m1,s0).
  mech[4].noise_states = 32;
  mech[4].pmf = bit_vector_pmf({p.outcome_suppressed_u0, p.outcome_suppressed_u1, p.outcome_m0_s0,
                                p.outcome_m0_s1, p.outcome_m1_s0});
  for (int u = 0; u < 2; ++u) {
    for (int s_avail = 0; s_avail < 2; ++s_avail) {
      for (int m = 0; m < 2; ++m) {
        int bit = 0;
        if (m == 1 && s_avail == 1) {
          bit = u;
        } else if (m == 0) {
          bit = s_avail == 0 ? 2 : 3;
        } else {
          bit = 4;
        }
        for (int s = 0; s < 32; ++s) mech[4].table.push_back(s >> bit & 1);
      }
    }
  }
  return DiscreteNpsem(g, std::move(mech));
}

RiverBlindnessParams perturb(const RiverBlindnessParams& p, const Rational& epsilon) {
  RiverBlindnessParams out = p;
  out.mediator_untreated_u0 += epsilon / (1 - p.predisposition);
  out.mediator_untreated_u1 -= epsilon / p.predisposition;
  for (const Rational* v : {&out.mediator_untreated_u0, &out.mediator_untreated_u1}) {
    if (*v <= 0 || *v >= 1) {
      throw EpsilonTooLarge("perturbation moves p(M(a0,u)=1) outside (0, 1)");
    }
  }
  return out;
}

}  // namespace pathid
