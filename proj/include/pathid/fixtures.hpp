#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "pathid/graph.hpp"
#include "pathid/npsem.hpp"
#include "pathid/rational.hpp"

namespace pathid {

struct GraphFixture {
  std::string name;
  HiddenDag graph;
  std::string description;
};

// Worked-example graphs plus textbook back-door and front-door graphs.
const std::vector<GraphFixture>& fixture_graphs();
const HiddenDag& fixture_graph(std::string_view name);

// Parameters of the River Blindness NPSEM-IE over U, A, S, M, Y (U, S hidden).
// Determinism is built in: S copies A, M under treatment ignores U, Y ignores
// U unless M = 1 and S = 1.
struct RiverBlindnessParams {
  Rational predisposition;                  // p(U=1)
  Rational treatment;                       // p(A=1)
  Rational mediator_untreated_u0;           // p(M(a0,u0)=1)
  Rational mediator_untreated_u1;           // p(M(a0,u1)=1)
  Rational mediator_treated;                // p(M(a1)=1)
  Rational outcome_suppressed_u0;           // p(Y(m1,s1,u0)=1)
  Rational outcome_suppressed_u1;           // p(Y(m1,s1,u1)=1)
  Rational outcome_m0_s0;                   // p(Y(m0,s0)=1)
  Rational outcome_m0_s1;                   // p(Y(m0,s1)=1)
  Rational outcome_m1_s0;                   // p(Y(m1,s0)=1)

  // Distinct sixteenths: a non-degenerate point for "almost all" claims.
  static RiverBlindnessParams generic();
  friend bool operator==(const RiverBlindnessParams&, const RiverBlindnessParams&) = default;
};

// Throws OutOfRange unless every parameter lies strictly inside (0, 1).
DiscreteNpsem river_blindness(const RiverBlindnessParams& p);

// Moves mass of M(a0, u) between the two predisposition strata without
// changing p(M=1|A=0). Throws EpsilonTooLarge if a parameter leaves (0, 1).
RiverBlindnessParams perturb(const RiverBlindnessParams& p, const Rational& epsilon);

}  // namespace pathid
