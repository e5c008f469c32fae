#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "pathid/graph.hpp"
#include "pathid/paths.hpp"
#include "pathid/rational.hpp"
#include "pathid/table.hpp"

namespace pathid {

enum class NoiseMode {
  Independent,  // NPSEM-IE: mutually independent noise coordinates
  Joint,        // FFRCISTG-joint: one joint pmf over all noise coordinates
};

// Structural equation of one vertex: output = table[row * noise_states + noise],
// where row is the mixed-radix index of the parent states (parents in
// declaration order, first parent most significant).
struct Mechanism {
  int noise_states = 1;
  std::vector<Rational> pmf;  // Independent mode only
  std::vector<int> table;
  friend bool operator==(const Mechanism&, const Mechanism&) = default;
};

// Finite noise configurations with positive probability.
struct NoiseSupport {
  int width = 0;              // one noise coordinate per vertex
  std::vector<int> noise;     // configurations, row-major
  std::vector<Rational> weight;
  std::size_t size() const { return weight.size(); }
  const int* row(std::size_t i) const { return noise.data() + i * width; }
};

class DiscreteNpsem {
 public:
  // Mechanisms are indexed like graph.base. In Joint mode `joint_pmf` is a
  // table over the noise coordinates, first vertex most significant.
  DiscreteNpsem(HiddenDag graph, std::vector<Mechanism> mechanisms,
                NoiseMode mode = NoiseMode::Independent, std::vector<Rational> joint_pmf = {});

  const HiddenDag& graph() const { return graph_; }
  const Admg& dag() const { return graph_.base; }
  const std::vector<Mechanism>& mechanisms() const { return mechanisms_; }
  const Mechanism& mechanism(int v) const { return mechanisms_[v]; }
  NoiseMode mode() const { return mode_; }
  const std::vector<Rational>& joint_pmf() const { return joint_pmf_; }
  const std::vector<int>& order() const { return order_; }

  // Output of v's mechanism given the full vertex-value vector and its noise.
  int output(int v, const std::vector<int>& values, int noise) const;
  int output_row(int v, int row, int noise) const {
    return mechanisms_[v].table[static_cast<std::size_t>(row) * mechanisms_[v].noise_states + noise];
  }

  // Enumerated lazily; limited by enumeration_cap().
  const NoiseSupport& support() const;

  friend bool operator==(const DiscreteNpsem& a, const DiscreteNpsem& b);

 private:
  HiddenDag graph_;
  std::vector<Mechanism> mechanisms_;
  NoiseMode mode_;
  std::vector<Rational> joint_pmf_;
  std::vector<int> order_;
  mutable std::shared_ptr<const NoiseSupport> support_;
};

// Default 10^7, overridden by the PATHID_ENUM_CAP environment variable.
std::uint64_t enumeration_cap();

// Exact law of the observed vertices, in declaration order.
JointTable observed_law(const DiscreteNpsem& m);

// Law of `targets` after replacing the mechanisms of the assigned vertices by
// constants.
JointTable intervene(const DiscreteNpsem& m, const std::map<std::string, int>& assignment,
                     const NameList& targets);

struct PseOptions {
  // Joint-mode models do not define cross-world laws; evaluating them anyway
  // (using the single joint noise draw) must be requested explicitly.
  bool allow_joint_cross_world = false;
};

// Law of the observed non-treatment vertices in the path-specific world
// V(pi, a, a'), where q's active values play a and baseline values a'.
JointTable pse_counterfactual(const DiscreteNpsem& m, const PseQuery& q, PseOptions options = {});

// Component name -> state.
using ComponentStates = std::map<std::string, int>;

// a^pi for an expansion of m's DAG (or of its projection when every child of
// a treatment is observed): active exactly on first edges of lifted paths.
ComponentStates component_states(const DiscreteNpsem& m, const ExpandedGraph& ex,
                                 const PseQuery& q);

struct ExpandedComparison {
  JointTable table;             // observed non-treatment vertices of V(a^pi)
  std::size_t configurations = 0;
  std::size_t mismatches = 0;   // configurations where V(a^pi) != V(pi,a,a')
  bool compared = false;
  bool pointwise_equal() const { return compared && mismatches == 0; }
};

// Evaluates the expanded model (components copy their treatment) intervened
// at `states`. With `compare`, checks unit-level equality against the
// path-specific recursion for that query on every noise configuration.
ExpandedComparison expanded_counterfactual(const DiscreteNpsem& m, const ExpandedGraph& ex,
                                           const ComponentStates& states,
                                           const PseQuery* compare = nullptr);

// One counterfactual variable, e.g. Y(A=1, M=0).
struct CounterfactualVar {
  std::string vertex;
  std::map<std::string, int> intervention;
  std::string name() const;
};

JointTable cross_world_table(const DiscreteNpsem& m, const std::vector<CounterfactualVar>& vars);

// Two-arm to four-arm check on a model over a (N, O) expanded DAG.
struct FourArmReport {
  int x = 0;
  NameList variables;                       // mediators then outcome
  std::map<std::pair<int, int>, JointTable> arms;  // (n, o) -> law of variables
  bool mediator_condition = false;          // mediators(x, 0) ~ mediators(x, 1)
  bool outcome_condition = false;           // Y | mediators equal across n at o = x*
  JointTable reconstruction;                // p(Y(x*,x*) | M(x*,x*)) p(M(x,x))
  bool reconstruction_matches = false;      // equals the (x, x*) arm
};

FourArmReport four_arm(const DiscreteNpsem& m, const std::string& n_component,
                       const std::string& o_component, const NameList& mediators,
                       const std::string& outcome, int x);

// Random NPSEM-IE: positive noise pmfs, every mechanism row surjective.
DiscreteNpsem random_npsem(const HiddenDag& g, std::mt19937_64& rng, int noise_states = 3);

}  // namespace pathid
