#include "pathid/identify.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "pathid/errors.hpp"
#include "pathid/swig.hpp"

namespace pathid {

std::string NonIdentified::kind_name() const {
  switch (kind) {
    case Kind::RecantingWitness:
      return "recanting witness";
    case Kind::RecantingDistrict:
      return "recanting district";
    case Kind::Hedge:
      return "hedge";
    case Kind::ConflictingComponents:
      return "conflicting components";
  }
  return "unknown";
}

namespace {

std::string braces(const NameList& names) {
  std::string out = "{";
  for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "," : "") + names[i];
  return out + "}";
}

}  // namespace

std::string NonIdentified::describe() const {
  switch (kind) {
    case Kind::RecantingWitness:
      return "recanting witness " + vertices.at(0) + " (all witnesses " + braces(all_witnesses) + ")";
    case Kind::RecantingDistrict:
      return "recanting district " + braces(vertices) + ": " + treatment + " takes values " +
             values.at(0).label + " and " + values.at(1).label;
    case Kind::Hedge:
      return "hedge in district " + braces(vertices) + " blocking " + braces(subset);
    case Kind::ConflictingComponents:
      return "conflicting components at " + vertices.at(0) + ": components of " + treatment +
             " take values " + values.at(0).label + " and " + values.at(1).label;
  }
  return kind_name();
}

const Estimand& IdResult::estimand() const {
  if (const auto* e = std::get_if<Estimand>(&value_)) return *e;
  throw Error("query is not identified: " + std::get<NonIdentified>(value_).describe());
}

const NonIdentified& IdResult::certificate() const {
  if (const auto* n = std::get_if<NonIdentified>(&value_)) return *n;
  throw Error("query is identified; no certificate");
}

namespace {

std::vector<Binding> free_bindings(const Admg& g, VertexSet s) {
  std::vector<Binding> out;
  for (int v : s) out.push_back(free_binding(g.name(v)));
  return out;
}

VertexSet ancestors_within(const Admg& g, VertexSet s, VertexSet within) {
  VertexSet result = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next;
    for (int v : frontier) next |= g.parents(v) & within;
    frontier = next - result;
    result |= next;
  }
  return result;
}

VertexSet block_containing(const std::vector<VertexSet>& blocks, int v) {
  for (VertexSet b : blocks) {
    if (b.contains(v)) return b;
  }
  return {};
}

// Kernel-level normal form: products of chained conditionals are joined.
Estimand tidy(const Estimand& e) { return simplify(merge_chains(simplify(e))); }

struct HedgeFound {
  VertexSet district;
  VertexSet target;
};

// Symbolic district kernels on one graph; Q[T] for a district T of the whole
// graph is built from observed conditionals, smaller kernels by the
// ancestral-sum / ratio recursion.
class KernelEngine {
 public:
  explicit KernelEngine(const Admg& g)
      : g_(g), order_(topological_indices(g)), rank_(topological_rank(g)) {}

  Estimand kernel(VertexSet district) const {
    std::vector<Estimand> fs;
    for (int v : order_) {
      if (!district.contains(v)) continue;
      VertexSet prefix;
      for (int w : order_) {
        prefix.insert(w);
        if (w == v) break;
      }
      VertexSet own = block_containing(districts(g_, prefix), v);
      VertexSet blanket = (own | parents(g_, own)) - VertexSet::single(v);
      fs.push_back(Estimand::prob({free_binding(g_.name(v))}, free_bindings(g_, blanket)));
    }
    return Estimand::product(std::move(fs));
  }

  std::variant<Estimand, HedgeFound> identify(VertexSet target, VertexSet district,
                                              const Estimand& q) const {
    VertexSet anc = ancestors_within(g_, target, district);
    if (anc == target) return tidy(Estimand::sum(g_.names(district - target), q));
    if (anc == district) return HedgeFound{district, target};
    Estimand q_anc = tidy(Estimand::sum(g_.names(district - anc), q));
    VertexSet next = block_containing(districts(g_, anc), target.first());
    std::vector<Estimand> fs;
    VertexSet upto;
    for (int v : order_) {
      if (!anc.contains(v)) continue;
      VertexSet before = upto;
      upto.insert(v);
      if (!next.contains(v)) continue;
      Estimand num = Estimand::sum(g_.names(anc - upto), q_anc);
      Estimand den =
          before.empty() ? Estimand::one() : Estimand::sum(g_.names(anc - before), q_anc);
      fs.push_back(Estimand::quotient(num, den));
    }
    return identify(target, next, tidy(Estimand::product(std::move(fs))));
  }

 private:
  const Admg& g_;
  std::vector<int> order_;
  std::vector<int> rank_;
};

using ValueMap = std::map<std::string, Value>;
using Policy = std::function<std::variant<ValueMap, NonIdentified>(const Admg&, VertexSet)>;

// Identifies p(outcome(x)) on g, where the values of the intervened vertices
// may differ per district factor (decided by `policy`).
IdResult identify_core(const Admg& g, const NameList& intervened, const NameList& outcome,
                       const Policy& policy) {
  VertexSet anc = ancestors(g, g.set_of(outcome));
  Admg sub = g.induced(anc);
  VertexSet x;
  for (const auto& name : intervened) {
    if (auto i = sub.find(name)) x.insert(*i);
  }
  VertexSet y = sub.set_of(outcome);
  VertexSet rest = sub.all() - x;
  VertexSet dstar = ancestors_within(sub, y, rest);
  auto parts = districts(sub, dstar);
  auto whole = districts(sub, sub.all());

  KernelEngine engine(sub);
  std::vector<Estimand> kernels;
  for (VertexSet d : parts) {
    VertexSet t = block_containing(whole, d.first());
    auto r = engine.identify(d, t, engine.kernel(t));
    if (const auto* h = std::get_if<HedgeFound>(&r)) {
      NonIdentified n{NonIdentified::Kind::Hedge, sub.names(h->district), sub.names(h->target),
                      {}, {}, {}};
      return n;
    }
    kernels.push_back(std::get<Estimand>(r));
  }

  std::vector<Estimand> factors;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    auto values = policy(sub, parts[i]);
    if (const auto* n = std::get_if<NonIdentified>(&values)) return *n;
    factors.push_back(substitute(kernels[i], std::get<ValueMap>(values)));
  }
  Estimand result = Estimand::sum(sub.names(dstar - y), Estimand::product(std::move(factors)));

  // Vertices outside D* and the intervention that remain free do not affect
  // the value; average them over their observed marginal.
  auto fv = free_variables(result);
  VertexSet stray;
  for (int v : sub.all() - dstar - x) {
    if (fv.count(sub.name(v))) stray.insert(v);
  }
  if (!stray.empty()) {
    result = Estimand::sum(
        sub.names(stray),
        Estimand::product({Estimand::prob(free_bindings(sub, stray)), result}));
  }
  return canonicalize(simplify(result), topological_order(g));
}

void require_observed(const HiddenDag& d, const NameList& names) {
  for (const auto& n : names) {
    if (d.is_hidden(d.base.index(n))) throw InvalidQuery("'" + n + "' is hidden");
  }
}

}  // namespace

Estimand g_formula(const Admg& g, const Intervention& intervention, const NameList& outcome) {
  if (g.has_bidirected_edges()) throw HasBidirected();
  VertexSet x;
  for (const auto& [v, value] : intervention) x.insert(g.index(v));
  VertexSet y = g.set_of(outcome);
  if (x.intersects(y)) throw InvalidQuery("outcome is intervened on");
  std::vector<Estimand> fs;
  for (int v : topological_indices(g)) {
    if (x.contains(v)) continue;
    std::vector<Binding> given;
    for (int p : g.parents(v)) {
      auto it = intervention.find(g.name(p));
      if (it == intervention.end()) {
        given.push_back(free_binding(g.name(p)));
      } else {
        given.push_back(Binding{g.name(p), Value::constant(it->second.label, it->second.state)});
      }
    }
    fs.push_back(Estimand::prob({free_binding(g.name(v))}, std::move(given)));
  }
  Estimand joint = Estimand::sum(g.names(g.all() - x - y), Estimand::product(std::move(fs)));
  return canonicalize(simplify(joint), topological_order(g));
}

IdResult id(const Admg& g, const Intervention& intervention, const NameList& outcome) {
  NameList intervened;
  ValueMap values;
  for (const auto& [v, value] : intervention) {
    g.index(v);
    intervened.push_back(v);
    values[v] = Value::constant(value.label, value.state);
  }
  VertexSet y = g.set_of(outcome);
  if (y.intersects(g.set_of(intervened))) throw InvalidQuery("outcome is intervened on");
  return identify_core(g, intervened, outcome,
                       [&](const Admg&, VertexSet) -> std::variant<ValueMap, NonIdentified> {
                         return values;
                       });
}

namespace {

// Per-district treatment values induced by the edge assignment; extra maps
// further intervened vertices (conditioning vertices moved by Rule 2).
Policy edge_policy(const PseQuery& q, const ExpandedGraph& ex, const EdgeAssignment& assignment,
                   ValueMap extra) {
  return [&q, &ex, &assignment, extra = std::move(extra)](
             const Admg& sub, VertexSet district) -> std::variant<ValueMap, NonIdentified> {
    ValueMap out = extra;
    for (const auto& [treatment, values] : q.treatments) {
      std::vector<ValueLabel> seen;
      for (const auto& comp : ex.components()) {
        const Component& c = ex.origin.at(comp);
        if (c.treatment != treatment) continue;
        for (const auto& child : c.children) {
          auto idx = sub.find(child);
          if (!idx || !district.contains(*idx)) continue;
          const ValueLabel& v = assignment.at(EdgeKey{treatment, child});
          if (std::find(seen.begin(), seen.end(), v) == seen.end()) seen.push_back(v);
        }
      }
      if (seen.size() > 1) {
        NonIdentified n{NonIdentified::Kind::RecantingDistrict, sub.names(district), {}, treatment,
                        {seen[0], seen[1]}, {}};
        return n;
      }
      const ValueLabel& v = seen.empty() ? values.baseline : seen.front();
      out[treatment] = Value::constant(v.label, v.state);
    }
    return out;
  };
}

std::variant<EdgeAssignment, NonIdentified> edge_assignment(const PseQuery& q, const Admg& g) {
  try {
    return assignment_from_paths(q, g);
  } catch (const EdgeInconsistent& e) {
    NonIdentified n{NonIdentified::Kind::RecantingWitness, {e.witness()}, {}, {}, {},
                    e.all_witnesses()};
    return n;
  }
}

}  // namespace

IdResult id_path_specific(const Admg& g, const PseQuery& q) {
  if (!q.given.empty()) return idc_path_specific(g, q);
  auto assigned = edge_assignment(q, g);
  if (const auto* n = std::get_if<NonIdentified>(&assigned)) return *n;
  const auto& assignment = std::get<EdgeAssignment>(assigned);
  ExpandedGraph ex = edge_expand(g, q.treatment_names());
  return identify_core(g, q.treatment_names(), q.outcome, edge_policy(q, ex, assignment, {}));
}

IdResult id_path_specific(const HiddenDag& d, const PseQuery& q) {
  require_observed(d, q.outcome);
  require_observed(d, q.treatment_names());
  require_observed(d, q.given);
  return id_path_specific(latent_project(d), q);
}

Estimand npsem_ie_edge_g(const Admg& g, const PseQuery& q) {
  if (g.has_bidirected_edges()) throw HasBidirected();
  EdgeAssignment assignment = assignment_from_paths(q, g);
  VertexSet treat = g.set_of(q.treatment_names());
  std::vector<Estimand> fs;
  for (int v : topological_indices(g)) {
    if (treat.contains(v)) continue;
    std::vector<Binding> given;
    for (int p : g.parents(v)) {
      if (treat.contains(p)) {
        const ValueLabel& value = assignment.at(EdgeKey{g.name(p), g.name(v)});
        given.push_back(Binding{g.name(p), Value::constant(value.label, value.state)});
      } else {
        given.push_back(free_binding(g.name(p)));
      }
    }
    fs.push_back(Estimand::prob({free_binding(g.name(v))}, std::move(given)));
  }
  return canonicalize(Estimand::product(std::move(fs)), topological_order(g));
}

Estimand marginalize(const Estimand& e, const NameList& keep, const Admg& g) {
  return canonicalize(simplify(Estimand::marginal(keep, e)), topological_order(g));
}

IdResult idc_path_specific(const Admg& g, const PseQuery& q, ConditionalPlan* plan) {
  auto assigned = edge_assignment(q, g);
  if (const auto* n = std::get_if<NonIdentified>(&assigned)) return *n;
  const auto& assignment = std::get<EdgeAssignment>(assigned);
  ExpandedGraph ex = edge_expand(g, q.treatment_names());

  std::map<std::string, std::string> fixed;
  for (const auto& comp : ex.components()) {
    const Component& c = ex.origin.at(comp);
    fixed[comp] = assignment.at(EdgeKey{c.treatment, c.children.front()}).label;
  }
  auto rank = topological_rank(g);
  NameList given = q.given;
  std::stable_sort(given.begin(), given.end(), [&](const std::string& a, const std::string& b) {
    return rank[g.index(a)] < rank[g.index(b)];
  });
  NameList moved;
  NameList remaining = given;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& w : remaining) {
      auto interventions = fixed;
      for (const auto& z : moved) interventions[z] = z;
      interventions[w] = w;
      Swig s = construct_swig(ex.graph, interventions);
      NameList others;
      for (const auto& r : remaining) {
        if (r != w) others.push_back(r);
      }
      if (d_separated(s, q.outcome, {w}, others)) {
        moved.push_back(w);
        remaining.erase(std::find(remaining.begin(), remaining.end(), w));
        changed = true;
        break;
      }
    }
  }
  if (plan) *plan = ConditionalPlan{moved, remaining};

  ValueMap extra;
  for (const auto& z : moved) extra[z] = Value::var(z);
  NameList joint_outcome = q.outcome;
  joint_outcome.insert(joint_outcome.end(), remaining.begin(), remaining.end());
  NameList intervened = q.treatment_names();
  intervened.insert(intervened.end(), moved.begin(), moved.end());
  IdResult joint =
      identify_core(g, intervened, joint_outcome, edge_policy(q, ex, assignment, extra));
  if (!joint.identified() || remaining.empty()) return joint;
  Estimand ratio =
      Estimand::quotient(joint.estimand(), Estimand::sum(q.outcome, joint.estimand()));
  return canonicalize(simplify(ratio), topological_order(g));
}

IdResult idc_path_specific(const HiddenDag& d, const PseQuery& q, ConditionalPlan* plan) {
  require_observed(d, q.outcome);
  require_observed(d, q.treatment_names());
  require_observed(d, q.given);
  return idc_path_specific(latent_project(d), q, plan);
}

Estimand rewrite_determinism(const Estimand& e, const ExpandedGraph& ex) {
  return std::visit(
      [&](const auto& n) -> Estimand {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, CondProb>) {
          auto rewrite = [&](const std::vector<Binding>& list) {
            std::vector<Binding> out;
            for (auto b : list) {
              auto it = ex.origin.find(b.vertex);
              if (it != ex.origin.end()) b.vertex = it->second.treatment;
              bool duplicate = false;
              for (const auto& o : out) {
                if (o.vertex != b.vertex) continue;
                if (!(o.value == b.value)) {
                  throw InvalidQuery("conflicting values for '" + b.vertex + "' in one term");
                }
                duplicate = true;
              }
              if (!duplicate) out.push_back(b);
            }
            return out;
          };
          auto given = rewrite(n.given);
          std::vector<Binding> targets;
          for (const auto& b : rewrite(n.targets)) {
            bool in_given = false;
            for (const auto& gb : given) {
              if (gb.vertex != b.vertex) continue;
              if (!(gb.value == b.value)) {
                throw InvalidQuery("conflicting values for '" + b.vertex + "' in one term");
              }
              in_given = true;
            }
            if (!in_given) targets.push_back(b);
          }
          return Estimand::prob(std::move(targets), std::move(given));
        } else if constexpr (std::is_same_v<T, Product>) {
          std::vector<Estimand> fs;
          for (const auto& f : n.factors) fs.push_back(rewrite_determinism(f, ex));
          return Estimand::product(std::move(fs));
        } else if constexpr (std::is_same_v<T, Sum>) {
          return Estimand::sum(n.vars, rewrite_determinism(n.body, ex));
        } else if constexpr (std::is_same_v<T, Quotient>) {
          return Estimand::quotient(rewrite_determinism(n.numerator, ex),
                                    rewrite_determinism(n.denominator, ex));
        } else {
          return Estimand::marginal(n.keep, rewrite_determinism(n.body, ex));
        }
      },
      e.node().kind);
}

}  // namespace pathid
