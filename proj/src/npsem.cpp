#include "pathid/npsem.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <optional>
#include <set>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

constexpr std::uint64_t kDefaultCap = 10'000'000;

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

int parent_rows(const Admg& g, int v) {
  int rows = 1;
  for (int p : g.parents(v)) rows *= g.cardinality(p);
  return rows;
}

void check_pmf(const std::vector<Rational>& pmf, const std::string& what) {
  Rational total = 0;
  for (const auto& p : pmf) {
    if (p < 0) throw InvalidGraph(what + " has a negative probability");
    total += p;
  }
  if (total != 1) throw InvalidGraph(what + " does not sum to one");
}

}  // namespace

std::uint64_t enumeration_cap() {
  if (const char* env = std::getenv("PATHID_ENUM_CAP")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
  }
  return kDefaultCap;
}

DiscreteNpsem::DiscreteNpsem(HiddenDag graph, std::vector<Mechanism> mechanisms, NoiseMode mode,
                             std::vector<Rational> joint_pmf)
    : graph_(std::move(graph)),
      mechanisms_(std::move(mechanisms)),
      mode_(mode),
      joint_pmf_(std::move(joint_pmf)),
      order_(topological_indices(graph_.base)) {
  const Admg& g = graph_.base;
  if (g.has_bidirected_edges()) throw InvalidGraph("a structural model needs a DAG");
  if (static_cast<int>(mechanisms_.size()) != g.size()) {
    throw InvalidGraph("expected one mechanism per vertex");
  }
  std::uint64_t joint_size = 1;
  for (int v = 0; v < g.size(); ++v) {
    const Mechanism& mech = mechanisms_[v];
    const std::string what = "mechanism of '" + g.name(v) + "'";
    if (mech.noise_states < 1) throw InvalidGraph(what + " has no noise states");
    std::size_t expected = static_cast<std::size_t>(parent_rows(g, v)) * mech.noise_states;
    if (mech.table.size() != expected) {
      throw InvalidGraph(what + " has " + std::to_string(mech.table.size()) + " entries, expected " +
                         std::to_string(expected));
    }
    for (int out : mech.table) {
      if (out < 0 || out >= g.cardinality(v)) throw InvalidGraph(what + " has an output out of range");
    }
    if (mode_ == NoiseMode::Independent) {
      if (static_cast<int>(mech.pmf.size()) != mech.noise_states) {
        throw InvalidGraph(what + " needs a noise pmf with " + std::to_string(mech.noise_states) +
                           " entries");
      }
      check_pmf(mech.pmf, "noise pmf of '" + g.name(v) + "'");
    }
    joint_size = saturating_mul(joint_size, static_cast<std::uint64_t>(mech.noise_states));
  }
  if (mode_ == NoiseMode::Joint) {
    if (joint_pmf_.size() != joint_size) throw InvalidGraph("joint noise pmf has the wrong size");
    check_pmf(joint_pmf_, "joint noise pmf");
  }
}

bool operator==(const DiscreteNpsem& a, const DiscreteNpsem& b) {
  return a.graph_ == b.graph_ && a.mechanisms_ == b.mechanisms_ && a.mode_ == b.mode_ &&
         a.joint_pmf_ == b.joint_pmf_;
}

int DiscreteNpsem::output(int v, const std::vector<int>& values, int noise) const {
  const Admg& g = graph_.base;
  int row = 0;
  for (int p : g.parents(v)) row = row * g.cardinality(p) + values[p];
  return output_row(v, row, noise);
}

const NoiseSupport& DiscreteNpsem::support() const {
  if (support_) return *support_;
  const int n = dag().size();
  std::uint64_t total = 1;
  for (const auto& mech : mechanisms_) {
    total = saturating_mul(total, static_cast<std::uint64_t>(mech.noise_states));
  }
  if (total > enumeration_cap()) {
    throw EnumerationLimit("model has " + std::to_string(total) +
                           " noise configurations, above the cap of " +
                           std::to_string(enumeration_cap()));
  }
  auto out = std::make_shared<NoiseSupport>();
  out->width = n;
  std::vector<int> current(n, 0);
  if (mode_ == NoiseMode::Independent) {
    std::vector<Rational> partial(n + 1);
    partial[0] = 1;
    // Depth-first over coordinates, pruning zero-probability prefixes.
    auto visit = [&](auto&& self, int v) -> void {
      if (v == n) {
        out->noise.insert(out->noise.end(), current.begin(), current.end());
        out->weight.push_back(partial[n]);
        return;
      }
      const Mechanism& mech = mechanisms_[v];
      for (int s = 0; s < mech.noise_states; ++s) {
        if (mech.pmf[s] == 0) continue;
        current[v] = s;
        partial[v + 1] = partial[v] * mech.pmf[s];
        self(self, v + 1);
      }
    };
    visit(visit, 0);
  } else {
    for (std::size_t flat = 0; flat < joint_pmf_.size(); ++flat) {
      if (joint_pmf_[flat] == 0) continue;
      std::size_t rest = flat;
      for (int v = n; v-- > 0;) {
        current[v] = static_cast<int>(rest % mechanisms_[v].noise_states);
        rest /= mechanisms_[v].noise_states;
      }
      out->noise.insert(out->noise.end(), current.begin(), current.end());
      out->weight.push_back(joint_pmf_[flat]);
    }
  }
  support_ = std::move(out);
  return *support_;
}

namespace {

// Solves every vertex in one world; pinned[v] >= 0 replaces v's mechanism.
void solve(const DiscreteNpsem& m, const int* noise, const std::vector<int>& pinned,
           std::vector<int>& values) {
  for (int v : m.order()) {
    values[v] = pinned[v] >= 0 ? pinned[v] : m.output(v, values, noise[v]);
  }
}

// Accumulates weights into a table over `cols` (vertex indices).
class Accumulator {
 public:
  Accumulator(const Admg& g, std::vector<int> cols) : cols_(std::move(cols)) {
    std::vector<Variable> vars;
    for (int c : cols_) vars.push_back({g.name(c), g.cardinality(c)});
    table_ = JointTable(std::move(vars));
  }
  void add(const std::vector<int>& values, const Rational& weight) {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < cols_.size(); ++i) {
      idx = idx * table_.variables()[i].cardinality + values[cols_[i]];
    }
    table_.at(idx) += weight;
  }
  JointTable take() { return std::move(table_); }

 private:
  std::vector<int> cols_;
  JointTable table_;
};

std::vector<int> indices_of(VertexSet s) {
  std::vector<int> out;
  for (int v : s) out.push_back(v);
  return out;
}

int checked_state(const Admg& g, int v, int state) {
  if (state < 0 || state >= g.cardinality(v)) {
    throw OutOfRange("state " + std::to_string(state) + " of '" + g.name(v) + "' is out of range");
  }
  return state;
}

// The path-specific recursion: base world under the baseline values, and
// the pi world where edges on lifted pi paths read the pi-world parent.
class PathSpecificWorld {
 public:
  PathSpecificWorld(const DiscreteNpsem& m, const PseQuery& q) : m_(m) {
    const Admg& g = m.dag();
    for (const auto& name : q.treatment_names()) {
      if (m.graph().is_hidden(g.index(name))) throw InvalidQuery("treatment '" + name + "' is hidden");
    }
    validate_query(q, latent_project(m.graph()));
    base_pins_.assign(g.size(), -1);
    active_.assign(g.size(), -1);
    for (const auto& [name, values] : q.treatments) {
      int v = g.index(name);
      treatments_.insert(v);
      base_pins_[v] = checked_state(g, v, values.baseline.state);
      active_[v] = checked_state(g, v, values.active.state);
    }
    pi_parents_.assign(g.size(), VertexSet{});
    for (const auto& path : lift_paths(m.graph(), q)) {
      for (std::size_t i = 0; i + 1 < path.size(); ++i) {
        pi_parents_[g.index(path[i + 1])].insert(g.index(path[i]));
      }
    }
    base_.resize(g.size());
    pi_.resize(g.size());
  }

  VertexSet treatments() const { return treatments_; }

  const std::vector<int>& run(const int* noise) {
    const Admg& g = m_.dag();
    solve(m_, noise, base_pins_, base_);
    for (int v : m_.order()) {
      if (treatments_.contains(v)) {
        pi_[v] = active_[v];
        continue;
      }
      int row = 0;
      for (int p : g.parents(v)) {
        row = row * g.cardinality(p) + (pi_parents_[v].contains(p) ? pi_[p] : base_[p]);
      }
      pi_[v] = m_.output_row(v, row, noise[v]);
    }
    return pi_;
  }

 private:
  const DiscreteNpsem& m_;
  VertexSet treatments_;
  std::vector<int> base_pins_;
  std::vector<int> active_;
  std::vector<VertexSet> pi_parents_;
  std::vector<int> base_;
  std::vector<int> pi_;
};

bool single_world(const DiscreteNpsem& m, const PseQuery& q) {
  bool same_values = std::all_of(q.treatments.begin(), q.treatments.end(), [](const auto& t) {
    return t.second.active.state == t.second.baseline.state;
  });
  if (same_values || q.paths.empty()) return true;
  Admg projected = latent_project(m.graph());
  auto all = enumerate_proper_causal_paths(projected, q.treatment_names(), q.outcome);
  std::set<Path> chosen(q.paths.begin(), q.paths.end());
  return chosen == std::set<Path>(all.begin(), all.end());
}

}  // namespace

JointTable observed_law(const DiscreteNpsem& m) {
  const Admg& g = m.dag();
  const NoiseSupport& s = m.support();
  Accumulator acc(g, indices_of(m.graph().observed()));
  std::vector<int> pins(g.size(), -1);
  std::vector<int> values(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    solve(m, s.row(i), pins, values);
    acc.add(values, s.weight[i]);
  }
  return acc.take();
}

JointTable intervene(const DiscreteNpsem& m, const std::map<std::string, int>& assignment,
                     const NameList& targets) {
  const Admg& g = m.dag();
  std::vector<int> pins(g.size(), -1);
  for (const auto& [name, state] : assignment) {
    int v = g.index(name);
    pins[v] = checked_state(g, v, state);
  }
  std::vector<int> cols;
  for (const auto& t : targets) cols.push_back(g.index(t));
  const NoiseSupport& s = m.support();
  Accumulator acc(g, cols);
  std::vector<int> values(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    solve(m, s.row(i), pins, values);
    acc.add(values, s.weight[i]);
  }
  return acc.take();
}

JointTable pse_counterfactual(const DiscreteNpsem& m, const PseQuery& q, PseOptions options) {
  PathSpecificWorld world(m, q);
  if (m.mode() == NoiseMode::Joint && !options.allow_joint_cross_world && !single_world(m, q)) {
    throw ModeMismatch("path-specific counterfactuals are cross-world; joint-mode models do not "
                       "define them");
  }
  const Admg& g = m.dag();
  Accumulator acc(g, indices_of(m.graph().observed() - world.treatments()));
  const NoiseSupport& s = m.support();
  for (std::size_t i = 0; i < s.size(); ++i) acc.add(world.run(s.row(i)), s.weight[i]);
  return acc.take();
}

ComponentStates component_states(const DiscreteNpsem& m, const ExpandedGraph& ex,
                                 const PseQuery& q) {
  const Admg& g = m.dag();
  std::set<std::pair<std::string, std::string>> first_edges;
  bool over_dag = ex.graph.size() - static_cast<int>(ex.origin.size()) == g.size();
  if (over_dag) {
    for (const auto& p : lift_paths(m.graph(), q)) first_edges.emplace(p[0], p[1]);
  } else {
    for (const auto& p : q.paths) first_edges.emplace(p[0], p[1]);
  }
  ComponentStates out;
  for (const auto& [name, comp] : ex.origin) {
    const TreatmentValues& values = q.values_of(comp.treatment);
    bool active = std::any_of(comp.children.begin(), comp.children.end(), [&](const auto& c) {
      return first_edges.count({comp.treatment, c}) > 0;
    });
    out[name] = active ? values.active.state : values.baseline.state;
  }
  return out;
}

ExpandedComparison expanded_counterfactual(const DiscreteNpsem& m, const ExpandedGraph& ex,
                                           const ComponentStates& states,
                                           const PseQuery* compare) {
  const Admg& g = m.dag();
  VertexSet treatments;
  for (const auto& [name, comp] : ex.origin) treatments.insert(g.index(comp.treatment));

  // override[v][p]: the component state v reads in place of treatment p.
  std::vector<std::map<int, int>> override_of(g.size());
  for (int v = 0; v < g.size(); ++v) {
    for (int p : g.parents(v) & treatments) {
      const std::string* found = nullptr;
      for (const auto& [name, comp] : ex.origin) {
        if (comp.treatment != g.name(p)) continue;
        if (std::find(comp.children.begin(), comp.children.end(), g.name(v)) == comp.children.end()) {
          continue;
        }
        if (found) {
          throw InvalidQuery("'" + g.name(v) + "' reads two components of '" + g.name(p) + "'");
        }
        found = &name;
      }
      if (!found) throw UncoveredChild(g.name(p), g.name(v));
      auto it = states.find(*found);
      if (it == states.end()) throw InvalidQuery("component '" + *found + "' has no value");
      override_of[v][p] = checked_state(g, p, it->second);
    }
  }

  std::optional<PathSpecificWorld> world;
  if (compare) world.emplace(m, *compare);

  ExpandedComparison result;
  Accumulator acc(g, indices_of(m.graph().observed() - treatments));
  const NoiseSupport& s = m.support();
  std::vector<int> values(g.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int* noise = s.row(i);
    for (int v : m.order()) {
      int row = 0;
      for (int p : g.parents(v)) {
        auto it = override_of[v].find(p);
        row = row * g.cardinality(p) + (it == override_of[v].end() ? values[p] : it->second);
      }
      values[v] = m.output_row(v, row, noise[v]);
    }
    acc.add(values, s.weight[i]);
    if (world) {
      const auto& expected = world->run(noise);
      for (int v : g.all() - treatments) {
        if (values[v] != expected[v]) {
          ++result.mismatches;
          break;
        }
      }
    }
  }
  result.configurations = s.size();
  result.compared = compare != nullptr;
  result.table = acc.take();
  return result;
}

std::string CounterfactualVar::name() const {
  if (intervention.empty()) return vertex;
  std::string out = vertex + "(";
  bool first = true;
  for (const auto& [v, state] : intervention) {
    out += (first ? "" : ",") + v + "=" + std::to_string(state);
    first = false;
  }
  return out + ")";
}

JointTable cross_world_table(const DiscreteNpsem& m, const std::vector<CounterfactualVar>& vars) {
  const Admg& g = m.dag();
  std::set<std::map<std::string, int>> worlds;
  for (const auto& v : vars) worlds.insert(v.intervention);
  if (m.mode() == NoiseMode::Joint && worlds.size() > 1) {
    throw ModeMismatch("cross-world joint laws are not defined by a joint-mode model");
  }
  std::vector<Variable> columns;
  std::vector<int> targets;
  std::vector<std::vector<int>> pins;
  for (const auto& v : vars) {
    targets.push_back(g.index(v.vertex));
    columns.push_back({v.name(), g.cardinality(targets.back())});
    std::vector<int> p(g.size(), -1);
    for (const auto& [name, state] : v.intervention) {
      int idx = g.index(name);
      p[idx] = checked_state(g, idx, state);
    }
    pins.push_back(std::move(p));
  }
  JointTable table(columns);
  const NoiseSupport& s = m.support();
  std::vector<int> values(g.size());
  std::vector<int> states(vars.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t k = 0; k < vars.size(); ++k) {
      solve(m, s.row(i), pins[k], values);
      states[k] = values[targets[k]];
    }
    table(states) += s.weight[i];
  }
  return table;
}

namespace {

// p(outcome | mediators) as a map from mediator configuration; entries with
// zero mediator mass are absent.
std::map<std::vector<int>, std::vector<Rational>> outcome_given_mediators(const JointTable& t) {
  std::map<std::vector<int>, std::vector<Rational>> out;
  const int outcome_card = t.variables().back().cardinality;
  for (std::size_t f = 0; f < t.size(); ++f) {
    auto states = t.states_of(f);
    int y = states.back();
    states.pop_back();
    auto& row = out[states];
    row.resize(outcome_card);
    row[y] += t.at(f);
  }
  for (auto it = out.begin(); it != out.end();) {
    Rational mass = std::accumulate(it->second.begin(), it->second.end(), Rational(0));
    if (mass == 0) {
      it = out.erase(it);
      continue;
    }
    for (auto& p : it->second) p /= mass;
    ++it;
  }
  return out;
}

}  // namespace

FourArmReport four_arm(const DiscreteNpsem& m, const std::string& n_component,
                       const std::string& o_component, const NameList& mediators,
                       const std::string& outcome, int x) {
  if (x != 0 && x != 1) throw OutOfRange("x must be 0 or 1");
  const int x_star = 1 - x;
  FourArmReport r;
  r.x = x;
  r.variables = mediators;
  r.variables.push_back(outcome);
  for (int n = 0; n < 2; ++n) {
    for (int o = 0; o < 2; ++o) {
      r.arms[{n, o}] = intervene(m, {{n_component, n}, {o_component, o}}, r.variables);
    }
  }
  r.mediator_condition = r.arms.at({x, 0}).marginal(mediators) == r.arms.at({x, 1}).marginal(mediators);

  auto given_n1 = outcome_given_mediators(r.arms.at({1, x_star}));
  auto given_n0 = outcome_given_mediators(r.arms.at({0, x_star}));
  r.outcome_condition = true;
  for (const auto& [config, dist] : given_n1) {
    auto it = given_n0.find(config);
    if (it != given_n0.end() && it->second != dist) r.outcome_condition = false;
  }

  auto given_ref = outcome_given_mediators(r.arms.at({x_star, x_star}));
  JointTable mediator_law = r.arms.at({x, x}).marginal(mediators);
  r.reconstruction = JointTable(r.arms.at({x, x_star}).variables());
  for (std::size_t f = 0; f < r.reconstruction.size(); ++f) {
    auto states = r.reconstruction.states_of(f);
    int y = states.back();
    states.pop_back();
    auto it = given_ref.find(states);
    if (it != given_ref.end()) r.reconstruction.at(f) = it->second[y] * mediator_law(states);
  }
  r.reconstruction_matches = r.reconstruction == r.arms.at({x, x_star});
  return r;
}

DiscreteNpsem random_npsem(const HiddenDag& d, std::mt19937_64& rng, int noise_states) {
  const Admg& g = d.base;
  std::uniform_int_distribution<int> weight(1, 8);
  std::vector<Mechanism> mechanisms;
  for (int v = 0; v < g.size(); ++v) {
    const int card = g.cardinality(v);
    if (noise_states < card) {
      throw InvalidGraph("noise of '" + g.name(v) + "' has fewer states than the vertex");
    }
    Mechanism mech;
    mech.noise_states = noise_states;
    int total = 0;
    for (int s = 0; s < noise_states; ++s) {
      int w = weight(rng);
      mech.pmf.emplace_back(w);
      total += w;
    }
    for (auto& p : mech.pmf) p /= total;
    std::uniform_int_distribution<int> output(0, card - 1);
    const int rows = parent_rows(g, v);
    for (int row = 0; row < rows; ++row) {
      std::vector<int> outs(noise_states);
      for (int s = 0; s < noise_states; ++s) outs[s] = s < card ? s : output(rng);
      std::shuffle(outs.begin(), outs.end(), rng);
      mech.table.insert(mech.table.end(), outs.begin(), outs.end());
    }
    mechanisms.push_back(std::move(mech));
  }
  return DiscreteNpsem(d, std::move(mechanisms));
}

}  // namespace pathid
