#include "pathid/swig.hpp"

#include <array>
#include <deque>
#include <set>
#include <sstream>

#include "pathid/errors.hpp"

namespace pathid {

const std::string& Swig::fixed_node(const std::string& base_vertex) const {
  auto it = split.find(base_vertex);
  if (it == split.end()) throw UnknownVertex(base_vertex);
  return it->second.fixed;
}

Swig construct_swig(const Admg& g, const std::map<std::string, std::string>& interventions) {
  std::set<std::string> taken;
  for (const auto& v : g.vertices()) taken.insert(v.name);
  for (const auto& [v, label] : interventions) g.index(v);

  Swig s;
  s.base = g;
  std::vector<Vertex> vs;
  for (const auto& v : g.vertices()) {
    vs.push_back(v);
    auto it = interventions.find(v.name);
    if (it == interventions.end()) continue;
    std::string fixed = "fixed_" + v.name;
    while (taken.count(fixed)) fixed += "_";
    taken.insert(fixed);
    vs.push_back(Vertex{fixed, v.cardinality});
    s.split.emplace(v.name, SplitNode{v.name, fixed, it->second});
  }
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (auto [a, b] : g.directed_edges()) {
    auto it = s.split.find(g.name(a));
    dir.emplace_back(it == s.split.end() ? g.name(a) : it->second.fixed, g.name(b));
  }
  for (auto [a, b] : g.bidirected_edges()) bi.emplace_back(g.name(a), g.name(b));
  s.graph = Admg(std::move(vs), dir, bi);

  for (const auto& [name, node] : s.split) s.fixed.insert(s.graph.index(node.fixed));
  for (const auto& v : g.vertices()) {
    VertexSet anc = ancestors(s.graph, VertexSet::single(s.graph.index(v.name))) & s.fixed;
    NameList labels;
    for (int f : anc) {
      for (const auto& [name, node] : s.split) {
        if (node.fixed == s.graph.name(f)) labels.push_back(node.label);
      }
    }
    s.relabeling.emplace(v.name, std::move(labels));
  }
  return s;
}

bool m_separated(const Admg& g, VertexSet x, VertexSet y, VertexSet z, VertexSet always_blocked) {
  if (x.intersects(y) || x.intersects(z) || y.intersects(z)) {
    throw OverlappingSets("separation sets must be disjoint");
  }
  const VertexSet open_colliders = ancestors(g, z);
  const VertexSet blocking = z | always_blocked;

  // State: vertex plus whether we arrived through an arrowhead at it.
  std::vector<std::array<bool, 2>> seen(g.size(), {false, false});
  std::deque<std::pair<int, bool>> queue;
  auto push = [&](int v, bool head) {
    if (!seen[v][head]) {
      seen[v][head] = true;
      queue.emplace_back(v, head);
    }
  };
  auto leave = [&](int v, auto&& allowed) {
    for (int c : g.children(v)) {
      if (allowed(false)) push(c, true);
    }
    for (int p : g.parents(v)) {
      if (allowed(true)) push(p, false);
    }
    for (int w : g.siblings(v)) {
      if (allowed(true)) push(w, true);
    }
  };
  for (int v : x) leave(v, [](bool) { return true; });
  while (!queue.empty()) {
    auto [v, head_in] = queue.front();
    queue.pop_front();
    if (y.contains(v)) return false;
    leave(v, [&](bool head_out) {
      if (head_in && head_out) return open_colliders.contains(v);
      return !blocking.contains(v);
    });
  }
  return true;
}

bool m_separated(const Admg& g, const NameList& x, const NameList& y, const NameList& z) {
  return m_separated(g, g.set_of(x), g.set_of(y), g.set_of(z));
}

bool d_separated(const Swig& s, const NameList& x, const NameList& y, const NameList& z) {
  return m_separated(s.graph, s.graph.set_of(x), s.graph.set_of(y), s.graph.set_of(z), s.fixed);
}

std::string render_swig(const Swig& s) {
  std::ostringstream out;
  auto display = [&](const std::string& name) {
    for (const auto& [base, node] : s.split) {
      if (node.fixed == name) return node.label;
    }
    std::string text = name;
    const auto& labels = s.relabeling.at(name);
    if (!labels.empty()) {
      text += "(";
      for (std::size_t i = 0; i < labels.size(); ++i) text += (i ? "," : "") + labels[i];
      text += ")";
    }
    auto it = s.split.find(name);
    if (it != s.split.end()) text += " | " + it->second.label;
    return text;
  };
  out << "vertices:";
  for (const auto& v : s.base.vertices()) out << "\n  " << display(v.name);
  out << "\nedges:";
  for (auto [a, b] : s.graph.directed_edges()) {
    out << "\n  " << display(s.graph.name(a)) << " -> " << display(s.graph.name(b));
  }
  for (auto [a, b] : s.graph.bidirected_edges()) {
    out << "\n  " << display(s.graph.name(a)) << " <-> " << display(s.graph.name(b));
  }
  out << "\n";
  return out.str();
}

}  // namespace pathid
