#include "pathid/table.hpp"

namespace pathid {

Table<double> to_double(const JointTable& t) {
  std::vector<double> values;
  values.reserve(t.size());
  for (const auto& v : t.values()) values.push_back(v.get_d());
  return Table<double>(t.variables(), std::move(values));
}

bool is_distribution(const JointTable& t) {
  Rational sum(0);
  for (const auto& v : t.values()) {
    if (v < 0) return false;
    sum += v;
  }
  return sum == 1;
}

Rational conditional(const JointTable& t, const std::vector<std::pair<std::string, int>>& target,
                     const std::vector<std::pair<std::string, int>>& given) {
  std::vector<std::pair<int, int>> tgt;
  std::vector<std::pair<int, int>> cond;
  for (const auto& [n, s] : target) tgt.emplace_back(t.index_of(n), s);
  for (const auto& [n, s] : given) cond.emplace_back(t.index_of(n), s);
  Rational joint(0);
  Rational denom(0);
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto states = t.states_of(f);
    bool in_cond = true;
    for (auto [c, s] : cond) in_cond = in_cond && states[c] == s;
    if (!in_cond) continue;
    denom += t.at(f);
    bool in_target = true;
    for (auto [c, s] : tgt) in_target = in_target && states[c] == s;
    if (in_target) joint += t.at(f);
  }
  if (denom == 0) throw ZeroConditioning();
  return joint / denom;
}

}  // namespace pathid
