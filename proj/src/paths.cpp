#include "pathid/paths.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "pathid/errors.hpp"

namespace pathid {

NameList PseQuery::treatment_names() const {
  NameList out;
  for (const auto& [name, values] : treatments) out.push_back(name);
  return out;
}

const TreatmentValues& PseQuery::values_of(const std::string& treatment) const {
  for (const auto& [name, values] : treatments) {
    if (name == treatment) return values;
  }
  throw InvalidQuery("'" + treatment + "' is not a treatment of the query");
}

NameList ExpandedGraph::components() const {
  NameList out;
  for (const auto& v : graph.vertices()) {
    if (is_component(v.name)) out.push_back(v.name);
  }
  return out;
}

const std::string& ExpandedGraph::component_for(const std::string& treatment,
                                                const std::string& child) const {
  const std::string* found = nullptr;
  for (const auto& [name, comp] : origin) {
    if (comp.treatment != treatment) continue;
    if (std::find(comp.children.begin(), comp.children.end(), child) == comp.children.end()) {
      continue;
    }
    if (found) throw InvalidQuery("several components of '" + treatment + "' feed '" + child + "'");
    found = &name;
  }
  if (!found) throw InvalidQuery("no component of '" + treatment + "' feeds '" + child + "'");
  return *found;
}

std::string render_path(const Path& p) {
  std::string out;
  for (const auto& v : p) {
    if (!out.empty()) out += " -> ";
    out += v;
  }
  return out;
}

void validate_query(const PseQuery& q, const Admg& g) {
  if (q.outcome.empty()) throw InvalidQuery("query has no outcome");
  if (q.treatments.empty()) throw InvalidQuery("query has no treatment");
  VertexSet outcome = g.set_of(q.outcome);
  VertexSet treat = g.set_of(q.treatment_names());
  VertexSet given = g.set_of(q.given);
  if (treat.size() != static_cast<int>(q.treatments.size())) {
    throw InvalidQuery("duplicate treatment");
  }
  if (outcome.intersects(treat)) throw InvalidQuery("outcome and treatment sets overlap");
  if (given.intersects(outcome | treat)) {
    throw InvalidQuery("conditioning set overlaps outcome or treatment");
  }
  for (const auto& [name, values] : q.treatments) {
    int card = g.cardinality(g.index(name));
    for (const auto* v : {&values.active, &values.baseline}) {
      if (v->state < 0 || v->state >= card) {
        throw InvalidQuery("state " + std::to_string(v->state) + " out of range for '" + name + "'");
      }
    }
  }
  for (const auto& p : q.paths) {
    if (p.size() < 2) throw InvalidPath("path '" + render_path(p) + "' has no edge");
    std::vector<int> idx;
    for (const auto& v : p) {
      auto i = g.find(v);
      if (!i) throw InvalidPath("path '" + render_path(p) + "' uses unknown vertex '" + v + "'");
      idx.push_back(*i);
    }
    if (!treat.contains(idx.front())) {
      throw InvalidPath("path '" + render_path(p) + "' does not start at a treatment");
    }
    if (!outcome.contains(idx.back())) {
      throw InvalidPath("path '" + render_path(p) + "' does not end at an outcome");
    }
    for (std::size_t i = 1; i < idx.size(); ++i) {
      if (!g.has_directed(idx[i - 1], idx[i])) {
        throw InvalidPath("path '" + render_path(p) + "' uses missing edge " + p[i - 1] + " -> " +
                          p[i]);
      }
      if (treat.contains(idx[i])) {
        throw InvalidPath("path '" + render_path(p) + "' is not proper");
      }
    }
  }
}

std::vector<std::vector<int>> proper_causal_paths(const Admg& g, VertexSet from, VertexSet to) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  std::function<void(int)> walk = [&](int v) {
    current.push_back(v);
    if (current.size() > 1 && to.contains(v)) out.push_back(current);
    for (int c : g.children(v) - from) walk(c);
    current.pop_back();
  };
  for (int s : from) walk(s);
  std::stable_sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<Path> enumerate_proper_causal_paths(const Admg& g, const NameList& from,
                                                const NameList& to) {
  VertexSet a = g.set_of(from);
  VertexSet y = g.set_of(to);
  if (a.intersects(y)) throw OverlappingSets("treatment and outcome sets overlap");
  std::vector<Path> out;
  for (const auto& p : proper_causal_paths(g, a, y)) {
    Path named;
    for (int v : p) named.push_back(g.name(v));
    out.push_back(std::move(named));
  }
  return out;
}

namespace {

Decomposition per_edge_decomposition(const Admg& g, const NameList& treatments) {
  std::set<std::string> taken;
  for (const auto& v : g.vertices()) taken.insert(v.name);
  Decomposition out;
  for (const auto& t : treatments) {
    std::vector<ComponentSpec> comps;
    for (int c : g.children(g.index(t))) {
      std::string name = t + "_" + g.name(c);
      while (taken.count(name)) name += "_";
      taken.insert(name);
      comps.push_back(ComponentSpec{name, {g.name(c)}});
    }
    out.emplace_back(t, std::move(comps));
  }
  return out;
}

}  // namespace

ExpandedGraph edge_expand(const Admg& g, const NameList& treatments) {
  return expand_custom(g, per_edge_decomposition(g, treatments));
}

ExpandedGraph edge_expand(const HiddenDag& d, const NameList& treatments) {
  return expand_custom(d, per_edge_decomposition(d.base, treatments));
}

EdgeAssignment assignment_from_paths(const PseQuery& q, const Admg& g) {
  validate_query(q, g);
  VertexSet treat = g.set_of(q.treatment_names());
  VertexSet outcome = g.set_of(q.outcome);

  std::set<std::vector<int>> active;
  for (const auto& p : q.paths) {
    std::vector<int> idx;
    for (const auto& v : p) idx.push_back(g.index(v));
    active.insert(idx);
  }
  std::set<std::pair<int, int>> active_first;
  std::set<std::pair<int, int>> inactive_first;
  for (const auto& p : proper_causal_paths(g, treat, outcome)) {
    auto edge = std::make_pair(p[0], p[1]);
    (active.count(p) ? active_first : inactive_first).insert(edge);
  }

  std::vector<int> witnesses;
  for (const auto& e : active_first) {
    if (inactive_first.count(e)) witnesses.push_back(e.second);
  }
  if (!witnesses.empty()) {
    auto rank = topological_rank(g);
    std::sort(witnesses.begin(), witnesses.end(),
              [&](int a, int b) { return rank[a] < rank[b]; });
    witnesses.erase(std::unique(witnesses.begin(), witnesses.end()), witnesses.end());
    NameList all;
    for (int w : witnesses) all.push_back(g.name(w));
    throw EdgeInconsistent(all.front(), all);
  }

  EdgeAssignment out;
  for (const auto& [name, values] : q.treatments) {
    int t = g.index(name);
    for (int c : g.children(t)) {
      bool on = active_first.count({t, c}) > 0;
      out.emplace(EdgeKey{name, g.name(c)}, on ? values.active : values.baseline);
    }
  }
  return out;
}

namespace {

ExpandedGraph expand_impl(const Admg& g, VertexSet hidden, const Decomposition& decomposition) {
  std::set<std::string> taken;
  for (const auto& v : g.vertices()) taken.insert(v.name);
  std::map<int, const std::vector<ComponentSpec>*> by_treatment;
  ExpandedGraph ex;
  for (const auto& [treatment, comps] : decomposition) {
    int t = g.index(treatment);
    if (by_treatment.count(t)) throw InvalidQuery("treatment '" + treatment + "' decomposed twice");
    by_treatment[t] = &comps;
    VertexSet covered;
    for (const auto& c : comps) {
      if (!taken.insert(c.name).second) {
        throw InvalidGraph("component name '" + c.name + "' is already used");
      }
      for (const auto& child : c.children) {
        int v = g.index(child);
        if (!g.has_directed(t, v)) {
          throw InvalidGraph("'" + child + "' is not a child of '" + treatment + "'");
        }
        covered.insert(v);
      }
      ex.origin.emplace(c.name, Component{treatment, c.children});
    }
    for (int c : g.children(t) - covered) throw UncoveredChild(treatment, g.name(c));
  }

  std::vector<Vertex> vs;
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (int v = 0; v < g.size(); ++v) {
    vs.push_back(g.vertices()[v]);
    auto it = by_treatment.find(v);
    if (it == by_treatment.end()) continue;
    for (const auto& c : *it->second) vs.push_back(Vertex{c.name, g.cardinality(v)});
  }
  for (auto [a, b] : g.directed_edges()) {
    if (!by_treatment.count(a)) dir.emplace_back(g.name(a), g.name(b));
  }
  for (const auto& [t, comps] : by_treatment) {
    for (const auto& c : *comps) {
      dir.emplace_back(g.name(t), c.name);
      for (const auto& child : c.children) dir.emplace_back(c.name, child);
    }
  }
  for (auto [a, b] : g.bidirected_edges()) bi.emplace_back(g.name(a), g.name(b));
  ex.graph = Admg(std::move(vs), dir, bi);
  for (int h : hidden) ex.hidden.insert(ex.graph.index(g.name(h)));
  return ex;
}

}  // namespace

ExpandedGraph expand_custom(const Admg& g, const Decomposition& decomposition) {
  return expand_impl(g, {}, decomposition);
}

ExpandedGraph expand_custom(const HiddenDag& d, const Decomposition& decomposition) {
  return expand_impl(d.base, d.hidden, decomposition);
}

bool no_vertex_reads_conflicting_components(const ExpandedGraph& ex, const std::map<std::string, int>& assignment) {
  for (const auto& name : ex.components()) {
    if (!assignment.count(name)) throw InvalidQuery("component '" + name + "' has no value");
  }
  for (int v = 0; v < ex.graph.size(); ++v) {
    std::map<std::string, int> seen;
    for (int p : ex.graph.parents(v)) {
      auto it = ex.origin.find(ex.graph.name(p));
      if (it == ex.origin.end()) continue;
      int state = assignment.at(it->first);
      auto [pos, inserted] = seen.emplace(it->second.treatment, state);
      if (!inserted && pos->second != state) return false;
    }
  }
  return true;
}

std::vector<Path> lift_paths(const HiddenDag& d, const PseQuery& q) {
  const Admg& g = d.base;
  std::set<Path> wanted(q.paths.begin(), q.paths.end());
  std::vector<Path> out;
  for (const auto& p : proper_causal_paths(g, g.set_of(q.treatment_names()), g.set_of(q.outcome))) {
    Path full;
    Path projected;
    for (int v : p) {
      full.push_back(g.name(v));
      if (!d.hidden.contains(v)) projected.push_back(g.name(v));
    }
    if (wanted.count(projected)) out.push_back(std::move(full));
  }
  return out;
}

}  // namespace pathid
