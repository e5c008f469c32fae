#pragma once

#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pathid/graph.hpp"
#include "pathid/npsem.hpp"
#include "pathid/table.hpp"

namespace testing {

using pathid::Admg;
using pathid::HiddenDag;
using pathid::JointTable;
using pathid::Rational;

inline Admg make_graph(const std::vector<std::string>& names, const std::vector<pathid::Edge>& directed,
                       const std::vector<pathid::Edge>& bidirected = {}) {
  std::vector<pathid::Vertex> vs;
  for (const auto& n : names) vs.push_back({n, 2});
  return Admg(vs, directed, bidirected);
}

inline HiddenDag observed(const Admg& g) { return HiddenDag(g, {}); }

// Brute-force simulator kept apart from the library's enumeration: walks every
// noise configuration by odometer and evaluates mechanisms in topological
// order, with `fixed` vertices pinned.
inline JointTable brute_force(const pathid::DiscreteNpsem& m, const std::map<std::string, int>& fixed,
                              const std::vector<std::string>& targets) {
  const Admg& g = m.dag();
  std::vector<pathid::Variable> vars;
  for (const auto& t : targets) vars.push_back({t, g.cardinality(g.index(t))});
  JointTable out(vars);
  const int n = g.size();
  std::vector<int> noise(n, 0);
  auto order = pathid::topological_indices(g);
  while (true) {
    Rational weight = 1;
    for (int v = 0; v < n; ++v) weight *= m.mechanism(v).pmf[noise[v]];
    if (weight != 0) {
      std::vector<int> value(n, 0);
      for (int v : order) {
        auto it = fixed.find(g.name(v));
        value[v] = it != fixed.end() ? it->second : m.output(v, value, noise[v]);
      }
      std::vector<int> states;
      for (const auto& t : targets) states.push_back(value[g.index(t)]);
      out(states) += weight;
    }
    int v = 0;
    while (v < n && ++noise[v] == m.mechanism(v).noise_states) noise[v++] = 0;
    if (v == n) break;
  }
  return out;
}

inline Rational mean(const JointTable& t) {
  Rational total = 0;
  for (std::size_t f = 0; f < t.size(); ++f) total += t.states_of(f)[0] * t.at(f);
  return total;
}

// p(target | given) straight from a joint table by summation.
inline Rational cond(const JointTable& t, const std::map<std::string, int>& target,
                     const std::map<std::string, int>& given) {
  Rational num = 0, den = 0;
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto s = t.states_of(f);
    auto matches = [&](const std::map<std::string, int>& a) {
      for (const auto& [k, v] : a) {
        if (s[t.index_of(k)] != v) return false;
      }
      return true;
    };
    if (!matches(given)) continue;
    den += t.at(f);
    if (matches(target)) num += t.at(f);
  }
  return num / den;
}

inline JointTable random_table(const std::vector<std::string>& names, std::mt19937_64& rng) {
  std::vector<pathid::Variable> vars;
  for (const auto& n : names) vars.push_back({n, 2});
  JointTable t(vars);
  Rational total = 0;
  for (std::size_t f = 0; f < t.size(); ++f) {
    t.at(f) = Rational(static_cast<long>(rng() % 9 + 1));
    total += t.at(f);
  }
  for (std::size_t f = 0; f < t.size(); ++f) t.at(f) /= total;
  return t;
}

}  // namespace testing
