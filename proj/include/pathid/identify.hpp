#pragma once

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "pathid/estimand.hpp"
#include "pathid/graph.hpp"
#include "pathid/paths.hpp"

namespace pathid {

struct NonIdentified {
  enum class Kind { RecantingWitness, RecantingDistrict, Hedge, ConflictingComponents };
  Kind kind;
  NameList vertices;          // witness, district, hedge district or offending vertex
  NameList subset;            // Hedge: the district factor that could not be identified
  std::string treatment;      // RecantingDistrict / ConflictingComponents
  std::vector<ValueLabel> values;  // the two conflicting values
  NameList all_witnesses;     // RecantingWitness diagnostics

  std::string kind_name() const;
  std::string describe() const;
};

class IdResult {
 public:
  IdResult(Estimand e) : value_(std::move(e)) {}  // NOLINT(google-explicit-constructor)
  IdResult(NonIdentified n) : value_(std::move(n)) {}  // NOLINT(google-explicit-constructor)

  bool identified() const { return std::holds_alternative<Estimand>(value_); }
  const Estimand& estimand() const;
  const NonIdentified& certificate() const;

 private:
  std::variant<Estimand, NonIdentified> value_;
};

using Intervention = std::map<std::string, ValueLabel>;

// Truncated factorization on a DAG.
Estimand g_formula(const Admg& g, const Intervention& intervention, const NameList& outcome);

// Recursive district-based identification of p(Y(x)).
IdResult id(const Admg& g, const Intervention& intervention, const NameList& outcome);

IdResult id_path_specific(const Admg& g, const PseQuery& q);
IdResult id_path_specific(const HiddenDag& d, const PseQuery& q);

// Joint edge-g product over the non-treatment vertices (fully observed DAG).
Estimand npsem_ie_edge_g(const Admg& g, const PseQuery& q);

// Simplified marginal of an estimand onto `keep`.
Estimand marginalize(const Estimand& e, const NameList& keep, const Admg& g);

struct ConditionalPlan {
  NameList moved;      // conditioning vertices moved into the intervention
  NameList remaining;  // still conditioned on
};

IdResult idc_path_specific(const Admg& g, const PseQuery& q, ConditionalPlan* plan = nullptr);
IdResult idc_path_specific(const HiddenDag& d, const PseQuery& q, ConditionalPlan* plan = nullptr);

// Rewrites events on component vertices as events on their treatment.
Estimand rewrite_determinism(const Estimand& e, const ExpandedGraph& ex);

}  // namespace pathid
