#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "pathid/identify.hpp"
#include "pathid/npsem.hpp"
#include "pathid/paths.hpp"
#include "pathid/rational.hpp"
#include "pathid/table.hpp"

namespace pathid {

struct MediationVars {
  std::string treatment = "A";
  std::string mediator = "M";
  std::string outcome = "Y";
};

// Expectations code each outcome state by its index, so for a binary outcome
// E[Y] is p(Y=1).
//
// Sum_m (E[Y|m,a] - E[Y|m,a']) p(m|a').
Rational mediation_formula(const JointTable& t, int active, int baseline,
                           const MediationVars& vars = {});

// With active value a and baseline a':
//   ace = E[Y(a)] - E[Y(a')]
//   pde = E[Y(a,M(a'))] - E[Y(a')]      tie = E[Y(a)] - E[Y(a,M(a'))]
//   tde = E[Y(a)] - E[Y(a',M(a))]       pie = E[Y(a',M(a))] - E[Y(a')]
//   cde[m] = E[Y(a,m)] - E[Y(a',m)]
struct MediationContrasts {
  Rational ace, pde, tde, tie, pie;
  std::vector<Rational> cde;
};

// Requires an NPSEM-IE model (the nested counterfactuals are cross-world).
MediationContrasts contrasts(const DiscreteNpsem& m, int active, int baseline,
                             const MediationVars& vars = {});

struct PdeBounds {
  Rational lower, upper;
  Rational l0, u0, l1, u1;  // bounds on p(Y(a,m)=1 | M(a')=m)
};

// Binary M and Y only.
PdeBounds pde_bounds(const JointTable& t, int active, int baseline, const MediationVars& vars = {});

// Law of response types (M(a'), Y(a,0), Y(a,1)), indexed m*4 + y0*2 + y1.
using ResponseTypeLaw = std::array<Rational, 8>;

// Vertices of the polytope of response-type laws with p(M(a')=1) = p_m1 and
// p(Y(a,m)=1) = y[m]: every extreme way of coupling the mediator under the
// baseline with the outcome's response to the mediator under the active value.
std::vector<ResponseTypeLaw> response_type_vertices(const Rational& p_m1, const Rational& y0,
                                                    const Rational& y1);

// Observed law of binary A, M, Y.
struct BinaryMediationLaw {
  Rational p_a1;
  std::array<Rational, 2> m1_given_a;                 // p(M=1|A=a)
  std::array<std::array<Rational, 2>, 2> y1_given_am;  // p(Y=1|A=a,M=m)
  JointTable table() const;
};

// Joint-mode model over A -> M -> Y, A -> Y reproducing `law`, in which the
// cross-world pair (M(baseline), Y(active, .)) follows `coupling`; all other
// counterfactual coordinates are independent.
DiscreteNpsem coupled_model(const BinaryMediationLaw& law, int active,
                            const ResponseTypeLaw& coupling);

// p(V(components)) on an expanded graph from data where every component
// equals its treatment. Fails with ConflictingComponents when some vertex
// reads two components of one treatment set to different values.
IdResult separable_query(const ExpandedGraph& ex,
                         const std::map<std::string, ValueLabel>& components,
                         const NameList& outcome);

// Two-component form: the first component of the treatment gets x, the
// second x* = 1 - x, labelled "x" and "x*".
IdResult separable_query(const ExpandedGraph& ex, int x, const NameList& outcome);

}  // namespace pathid
