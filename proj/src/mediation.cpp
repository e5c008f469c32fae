#include "pathid/mediation.hpp"

#include <algorithm>
#include <set>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

// Law of (treatment, mediator, outcome) with helpers for conditionals.
class TripleLaw {
 public:
  TripleLaw(const JointTable& t, const MediationVars& vars)
      : law_(t.marginal({vars.treatment, vars.mediator, vars.outcome})) {}

  int treatment_states() const { return law_.variables()[0].cardinality; }
  int mediator_states() const { return law_.variables()[1].cardinality; }
  int outcome_states() const { return law_.variables()[2].cardinality; }

  void check_treatment(int a) const {
    if (a < 0 || a >= treatment_states()) throw OutOfRange("treatment state out of range");
  }
  Rational mass(int a) const {
    Rational total = 0;
    for (int m = 0; m < mediator_states(); ++m) total += mass(a, m);
    return total;
  }
  Rational mass(int a, int m) const {
    Rational total = 0;
    for (int y = 0; y < outcome_states(); ++y) total += law_({a, m, y});
    return total;
  }
  Rational mediator_given(int m, int a) const {
    Rational denom = mass(a);
    if (denom == 0) throw ZeroConditioning("treatment state " + std::to_string(a) + " has probability zero");
    return mass(a, m) / denom;
  }
  Rational mean_outcome_given(int a, int m) const {
    Rational denom = mass(a, m);
    if (denom == 0) {
      throw ZeroConditioning("treatment " + std::to_string(a) + ", mediator " + std::to_string(m) +
                             " has probability zero");
    }
    Rational total = 0;
    for (int y = 0; y < outcome_states(); ++y) total += y * law_({a, m, y});
    return total / denom;
  }
  Rational mean_outcome_given(int a) const {
    Rational denom = mass(a);
    if (denom == 0) throw ZeroConditioning("treatment state " + std::to_string(a) + " has probability zero");
    Rational total = 0;
    for (int m = 0; m < mediator_states(); ++m) {
      for (int y = 0; y < outcome_states(); ++y) total += y * law_({a, m, y});
    }
    return total / denom;
  }

 private:
  JointTable law_;
};

Rational mean_of_last(const JointTable& t) {
  Rational total = 0;
  for (std::size_t f = 0; f < t.size(); ++f) total += t.states_of(f).back() * t.at(f);
  return total;
}

}  // namespace

Rational mediation_formula(const JointTable& t, int active, int baseline, const MediationVars& vars) {
  TripleLaw law(t, vars);
  law.check_treatment(active);
  law.check_treatment(baseline);
  Rational total = 0;
  for (int m = 0; m < law.mediator_states(); ++m) {
    Rational weight = law.mediator_given(m, baseline);
    if (weight == 0) continue;
    total += (law.mean_outcome_given(active, m) - law.mean_outcome_given(baseline, m)) * weight;
  }
  return total;
}

MediationContrasts contrasts(const DiscreteNpsem& m, int active, int baseline,
                             const MediationVars& vars) {
  if (m.mode() != NoiseMode::Independent) {
    throw ModeMismatch("mediation contrasts need cross-world laws, defined only by an NPSEM-IE");
  }
  const Admg& g = m.dag();
  const int mediator_states = g.cardinality(g.index(vars.mediator));
  auto total_effect_mean = [&](int a) {
    return mean_of_last(intervene(m, {{vars.treatment, a}}, {vars.outcome}));
  };
  // E[Y(a_y, M(a_m))]
  auto nested_mean = [&](int a_y, int a_m) {
    Rational total = 0;
    for (int med = 0; med < mediator_states; ++med) {
      JointTable t = cross_world_table(
          m, {CounterfactualVar{vars.mediator, {{vars.treatment, a_m}}},
              CounterfactualVar{vars.outcome, {{vars.treatment, a_y}, {vars.mediator, med}}}});
      for (std::size_t f = 0; f < t.size(); ++f) {
        auto states = t.states_of(f);
        if (states[0] == med) total += states[1] * t.at(f);
      }
    }
    return total;
  };
  Rational y_active = total_effect_mean(active);
  Rational y_baseline = total_effect_mean(baseline);
  Rational cross_active = nested_mean(active, baseline);  // Y(a, M(a'))
  Rational cross_baseline = nested_mean(baseline, active);  // Y(a', M(a))

  MediationContrasts c;
  c.ace = y_active - y_baseline;
  c.pde = cross_active - y_baseline;
  c.tie = y_active - cross_active;
  c.tde = y_active - cross_baseline;
  c.pie = cross_baseline - y_baseline;
  for (int med = 0; med < mediator_states; ++med) {
    auto mean_at = [&](int a) {
      return mean_of_last(intervene(m, {{vars.treatment, a}, {vars.mediator, med}}, {vars.outcome}));
    };
    c.cde.push_back(mean_at(active) - mean_at(baseline));
  }
  return c;
}

PdeBounds pde_bounds(const JointTable& t, int active, int baseline, const MediationVars& vars) {
  TripleLaw law(t, vars);
  if (law.mediator_states() != 2 || law.outcome_states() != 2) {
    throw NotBinary("bounds need a binary mediator and outcome");
  }
  law.check_treatment(active);
  law.check_treatment(baseline);
  PdeBounds b;
  std::array<Rational, 2> lower_m, upper_m;
  Rational lower = 0, upper = 0;
  for (int m = 0; m < 2; ++m) {
    Rational p_m = law.mediator_given(m, baseline);
    if (p_m == 0) {
      throw ZeroConditioning("mediator state " + std::to_string(m) +
                             " has probability zero under the baseline");
    }
    Rational y_m = law.mean_outcome_given(active, m);
    lower_m[m] = std::max(Rational(0), Rational(1 + (y_m - 1) / p_m));
    upper_m[m] = std::min(Rational(y_m / p_m), Rational(1));
    lower += lower_m[m] * p_m;
    upper += upper_m[m] * p_m;
  }
  Rational y_baseline = law.mean_outcome_given(baseline);
  b.lower = lower - y_baseline;
  b.upper = upper - y_baseline;
  b.l0 = lower_m[0];
  b.u0 = upper_m[0];
  b.l1 = lower_m[1];
  b.u1 = upper_m[1];
  return b;
}

namespace {

// Solves a square system exactly; false when singular.
bool solve_exact(std::vector<std::vector<Rational>> a, std::vector<Rational> b,
                 std::vector<Rational>& x) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t pivot = col;
    while (pivot < n && a[pivot][col] == 0) ++pivot;
    if (pivot == n) return false;
    std::swap(a[pivot], a[col]);
    std::swap(b[pivot], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col] == 0) continue;
      Rational f = a[r][col] / a[col][col];
      for (std::size_t c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

}  // namespace

std::vector<ResponseTypeLaw> response_type_vertices(const Rational& p_m1, const Rational& y0,
                                                    const Rational& y1) {
  // Rows: normalization, p(M(a')=1), p(Y(a,0)=1), p(Y(a,1)=1).
  std::array<std::array<int, 8>, 4> rows{};
  for (int k = 0; k < 8; ++k) {
    rows[0][k] = 1;
    rows[1][k] = (k >> 2) & 1;
    rows[2][k] = (k >> 1) & 1;
    rows[3][k] = k & 1;
  }
  const std::vector<Rational> rhs{Rational(1), p_m1, y0, y1};
  std::set<std::vector<Rational>> seen;
  std::vector<ResponseTypeLaw> out;
  for (int mask = 0; mask < 256; ++mask) {
    if (__builtin_popcount(mask) != 4) continue;
    std::vector<int> basis;
    for (int k = 0; k < 8; ++k) {
      if (mask >> k & 1) basis.push_back(k);
    }
    std::vector<std::vector<Rational>> a(4, std::vector<Rational>(4));
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) a[r][c] = rows[r][basis[c]];
    }
    std::vector<Rational> x;
    if (!solve_exact(a, rhs, x)) continue;
    if (std::any_of(x.begin(), x.end(), [](const Rational& v) { return v < 0; })) continue;
    std::vector<Rational> full(8, Rational(0));
    for (int c = 0; c < 4; ++c) full[basis[c]] = x[c];
    if (!seen.insert(full).second) continue;
    ResponseTypeLaw law;
    std::copy(full.begin(), full.end(), law.begin());
    out.push_back(law);
  }
  return out;
}

JointTable BinaryMediationLaw::table() const {
  JointTable t({{"A", 2}, {"M", 2}, {"Y", 2}});
  for (int a = 0; a < 2; ++a) {
    Rational pa = a ? p_a1 : 1 - p_a1;
    for (int m = 0; m < 2; ++m) {
      Rational pm = m ? m1_given_a[a] : 1 - m1_given_a[a];
      for (int y = 0; y < 2; ++y) {
        Rational py = y ? y1_given_am[a][m] : 1 - y1_given_am[a][m];
        t({a, m, y}) = pa * pm * py;
      }
    }
  }
  return t;
}

DiscreteNpsem coupled_model(const BinaryMediationLaw& law, int active,
                            const ResponseTypeLaw& coupling) {
  if (active != 0 && active != 1) throw OutOfRange("active value must be 0 or 1");
  const int baseline = 1 - active;
  Admg g({{"A", 2}, {"M", 2}, {"Y", 2}}, {{"A", "M"}, {"A", "Y"}, {"M", "Y"}});
  auto bernoulli = [](const Rational& p1, int bit) { return bit ? p1 : Rational(1 - p1); };

  // A copies its noise; M's noise is (M(0), M(1)); Y's noise is its full
  // response function, bit (a,m) at position 3 - (2a + m).
  std::vector<Mechanism> mechanisms(3);
  mechanisms[0] = Mechanism{2, {}, {0, 1}};
  mechanisms[1].noise_states = 4;
  for (int a = 0; a < 2; ++a) {
    for (int s = 0; s < 4; ++s) mechanisms[1].table.push_back(a == 0 ? s >> 1 : s & 1);
  }
  mechanisms[2].noise_states = 16;
  for (int row = 0; row < 4; ++row) {
    for (int s = 0; s < 16; ++s) mechanisms[2].table.push_back((s >> (3 - row)) & 1);
  }

  auto y_bit = [](int s, int a, int m) { return (s >> (3 - (2 * a + m))) & 1; };
  auto m_bit = [](int s, int a) { return a == 0 ? s >> 1 : s & 1; };
  std::vector<Rational> joint(2 * 4 * 16);
  for (int an = 0; an < 2; ++an) {
    for (int mn = 0; mn < 4; ++mn) {
      for (int yn = 0; yn < 16; ++yn) {
        int type = m_bit(mn, baseline) * 4 + y_bit(yn, active, 0) * 2 + y_bit(yn, active, 1);
        joint[(an * 4 + mn) * 16 + yn] =
            bernoulli(law.p_a1, an) * coupling[type] *
            bernoulli(law.m1_given_a[active], m_bit(mn, active)) *
            bernoulli(law.y1_given_am[baseline][0], y_bit(yn, baseline, 0)) *
            bernoulli(law.y1_given_am[baseline][1], y_bit(yn, baseline, 1));
      }
    }
  }
  return DiscreteNpsem(HiddenDag(std::move(g), {}), std::move(mechanisms), NoiseMode::Joint,
                       std::move(joint));
}

IdResult separable_query(const ExpandedGraph& ex,
                         const std::map<std::string, ValueLabel>& components,
                         const NameList& outcome) {
  if (!ex.hidden.empty()) throw InvalidQuery("separable queries need a fully observed graph");
  for (const auto& name : ex.components()) {
    if (!components.count(name)) throw InvalidQuery("component '" + name + "' has no value");
  }
  const Admg& g = ex.graph;
  for (int v = 0; v < g.size(); ++v) {
    std::map<std::string, ValueLabel> seen;
    for (int p : g.parents(v)) {
      auto it = ex.origin.find(g.name(p));
      if (it == ex.origin.end()) continue;
      const ValueLabel& value = components.at(it->first);
      auto [pos, inserted] = seen.emplace(it->second.treatment, value);
      if (!inserted && !(pos->second == value)) {
        return NonIdentified{NonIdentified::Kind::ConflictingComponents,
                             {g.name(v)},
                             {},
                             it->second.treatment,
                             {pos->second, value},
                             {}};
      }
    }
  }
  Intervention intervention(components.begin(), components.end());
  Estimand e = g_formula(g, intervention, outcome);
  return canonicalize(simplify(rewrite_determinism(e, ex)), topological_order(g));
}

IdResult separable_query(const ExpandedGraph& ex, int x, const NameList& outcome) {
  if (x != 0 && x != 1) throw OutOfRange("x must be 0 or 1");
  std::map<std::string, int> used;
  std::map<std::string, ValueLabel> components;
  for (const auto& name : ex.components()) {
    int k = used[ex.origin.at(name).treatment]++;
    if (k > 1) throw InvalidQuery("the two-component form needs exactly two components");
    components[name] = k == 0 ? ValueLabel{"x", x} : ValueLabel{"x*", 1 - x};
  }
  return separable_query(ex, components, outcome);
}

}  // namespace pathid
