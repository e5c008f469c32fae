#include "pathid/graph.hpp"

#include <algorithm>
#include <functional>

#include "pathid/errors.hpp"

namespace pathid {

namespace {

std::string join_cycle(const std::vector<std::string>& cycle) {
  std::string out;
  for (const auto& v : cycle) {
    if (!out.empty()) out += " -> ";
    out += v;
  }
  return out;
}

bool valid_identifier(std::string_view s) {
  if (s.empty()) return false;
  auto alpha = [](char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(s[0])) return false;
  return std::all_of(s.begin(), s.end(), [&](char c) { return alpha(c) || digit(c) || c == '_'; });
}

// Returns one directed cycle if any exists.
std::optional<std::vector<int>> find_cycle(const std::vector<VertexSet>& children) {
  const int n = static_cast<int>(children.size());
  std::vector<int> color(n, 0);
  std::vector<int> stack;
  std::optional<std::vector<int>> found;
  std::function<bool(int)> visit = [&](int v) {
    color[v] = 1;
    stack.push_back(v);
    for (int c : children[v]) {
      if (color[c] == 1) {
        auto start = std::find(stack.begin(), stack.end(), c);
        std::vector<int> cycle(start, stack.end());
        cycle.push_back(c);
        found = cycle;
        return true;
      }
      if (color[c] == 0 && visit(c)) return true;
    }
    stack.pop_back();
    color[v] = 2;
    return false;
  };
  for (int v = 0; v < n; ++v) {
    if (color[v] == 0 && visit(v)) return found;
  }
  return std::nullopt;
}

}  // namespace

CycleDetected::CycleDetected(std::vector<std::string> cycle)
    : Error("directed cycle: " + join_cycle(cycle)), cycle_(std::move(cycle)) {}

Admg::Admg(std::vector<Vertex> vertices, const std::vector<Edge>& directed,
           const std::vector<Edge>& bidirected)
    : vertices_(std::move(vertices)) {
  if (vertices_.size() > static_cast<std::size_t>(VertexSet::kCapacity)) {
    throw InvalidGraph("graphs are limited to 64 vertices");
  }
  for (std::size_t i = 0; i < vertices_.size(); ++i) {
    const auto& v = vertices_[i];
    if (!valid_identifier(v.name)) throw InvalidGraph("invalid vertex name '" + v.name + "'");
    if (v.cardinality < 1) throw InvalidGraph("vertex '" + v.name + "' has no states");
    if (!index_.emplace(v.name, static_cast<int>(i)).second) {
      throw InvalidGraph("duplicate vertex '" + v.name + "'");
    }
  }
  const auto n = vertices_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  siblings_.assign(n, {});
  for (const auto& [from, to] : directed) {
    int a = index(from);
    int b = index(to);
    if (a == b) throw InvalidGraph("self-loop on '" + from + "'");
    if (children_[a].contains(b)) throw InvalidGraph("duplicate edge " + from + " -> " + to);
    children_[a].insert(b);
    parents_[b].insert(a);
  }
  for (const auto& [x, y] : bidirected) {
    int a = index(x);
    int b = index(y);
    if (a == b) throw InvalidGraph("self-loop on '" + x + "'");
    if (siblings_[a].contains(b)) throw InvalidGraph("duplicate edge " + x + " <-> " + y);
    siblings_[a].insert(b);
    siblings_[b].insert(a);
  }
  if (auto cycle = find_cycle(children_)) {
    std::vector<std::string> names;
    for (int v : *cycle) names.push_back(vertices_[v].name);
    throw CycleDetected(std::move(names));
  }
}

int Admg::index(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) throw UnknownVertex(std::string(name));
  return it->second;
}

std::optional<int> Admg::find(std::string_view name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Admg::has_bidirected_edges() const {
  return std::any_of(siblings_.begin(), siblings_.end(), [](VertexSet s) { return !s.empty(); });
}

std::vector<std::pair<int, int>> Admg::directed_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size(); ++a) {
    for (int b : children_[a]) out.emplace_back(a, b);
  }
  return out;
}

std::vector<std::pair<int, int>> Admg::bidirected_edges() const {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < size(); ++a) {
    for (int b : siblings_[a]) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

VertexSet Admg::set_of(const NameList& names) const {
  VertexSet s;
  for (const auto& n : names) s.insert(index(n));
  return s;
}

NameList Admg::names(VertexSet s) const {
  NameList out;
  for (int v : s) out.push_back(vertices_[v].name);
  return out;
}

Admg Admg::induced(VertexSet s) const {
  std::vector<Vertex> vs;
  for (int v : s) vs.push_back(vertices_[v]);
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  for (auto [a, b] : directed_edges()) {
    if (s.contains(a) && s.contains(b)) dir.emplace_back(name(a), name(b));
  }
  for (auto [a, b] : bidirected_edges()) {
    if (s.contains(a) && s.contains(b)) bi.emplace_back(name(a), name(b));
  }
  return Admg(std::move(vs), dir, bi);
}

bool operator==(const Admg& a, const Admg& b) {
  return a.vertices_ == b.vertices_ && a.children_ == b.children_ && a.siblings_ == b.siblings_;
}

HiddenDag::HiddenDag(Admg graph, const NameList& hidden_names)
    : base(std::move(graph)), hidden(base.set_of(hidden_names)) {}

std::vector<int> topological_indices(const Admg& g) {
  const int n = g.size();
  std::vector<int> indegree(n);
  for (int v = 0; v < n; ++v) indegree[v] = g.parents(v).size();
  VertexSet ready;
  for (int v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.insert(v);
  }
  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int v = ready.first();
    ready.erase(v);
    order.push_back(v);
    for (int c : g.children(v)) {
      if (--indegree[c] == 0) ready.insert(c);
    }
  }
  return order;
}

NameList topological_order(const Admg& g) {
  NameList out;
  for (int v : topological_indices(g)) out.push_back(g.name(v));
  return out;
}

std::vector<int> topological_rank(const Admg& g) {
  std::vector<int> rank(g.size());
  auto order = topological_indices(g);
  for (int i = 0; i < static_cast<int>(order.size()); ++i) rank[order[i]] = i;
  return rank;
}

std::vector<VertexSet> districts(const Admg& g, VertexSet s) {
  std::vector<VertexSet> out;
  VertexSet left = s;
  while (!left.empty()) {
    VertexSet block = VertexSet::single(left.first());
    VertexSet frontier = block;
    while (!frontier.empty()) {
      VertexSet next;
      for (int v : frontier) next |= g.siblings(v) & s;
      frontier = next - block;
      block |= next;
    }
    out.push_back(block);
    left -= block;
  }
  return out;
}

std::vector<NameList> districts(const Admg& g, const NameList& s) {
  std::vector<NameList> out;
  for (VertexSet d : districts(g, g.set_of(s))) out.push_back(g.names(d));
  return out;
}

namespace {

template <class Step>
VertexSet closure(VertexSet s, Step step) {
  VertexSet result = s;
  VertexSet frontier = s;
  while (!frontier.empty()) {
    VertexSet next;
    for (int v : frontier) next |= step(v);
    frontier = next - result;
    result |= next;
  }
  return result;
}

}  // namespace

VertexSet ancestors(const Admg& g, VertexSet s) {
  return closure(s, [&](int v) { return g.parents(v); });
}

VertexSet descendants(const Admg& g, VertexSet s) {
  return closure(s, [&](int v) { return g.children(v); });
}

VertexSet parents(const Admg& g, VertexSet s) {
  VertexSet out;
  for (int v : s) out |= g.parents(v);
  return out;
}

VertexSet children(const Admg& g, VertexSet s) {
  VertexSet out;
  for (int v : s) out |= g.children(v);
  return out;
}

NameList ancestors(const Admg& g, const NameList& s) { return g.names(ancestors(g, g.set_of(s))); }
NameList descendants(const Admg& g, const NameList& s) {
  return g.names(descendants(g, g.set_of(s)));
}
NameList parents(const Admg& g, const NameList& s) { return g.names(parents(g, g.set_of(s))); }
NameList children(const Admg& g, const NameList& s) { return g.names(children(g, g.set_of(s))); }

Admg latent_project(const HiddenDag& d) {
  const Admg& g = d.base;
  const VertexSet observed = d.observed();

  // For each vertex, hidden vertices reaching it along directed paths whose
  // interior is hidden (the hidden "sources" that can emit an arrowhead into it).
  std::vector<VertexSet> hidden_sources(g.size());
  for (int v = 0; v < g.size(); ++v) {
    VertexSet reach;
    VertexSet frontier = g.parents(v) & d.hidden;
    while (!frontier.empty()) {
      reach |= frontier;
      VertexSet next;
      for (int h : frontier) next |= g.parents(h) & d.hidden;
      frontier = next - reach;
    }
    hidden_sources[v] = reach;
  }

  std::vector<Vertex> vs;
  for (int v : observed) vs.push_back(g.vertices()[v]);
  std::vector<Edge> dir;
  std::vector<Edge> bi;
  // Directed: a -> b iff some child path from a through hidden vertices ends in b.
  for (int a : observed) {
    VertexSet seen;
    VertexSet frontier = g.children(a);
    VertexSet targets;
    while (!frontier.empty()) {
      VertexSet next;
      for (int v : frontier) {
        if (seen.contains(v)) continue;
        seen.insert(v);
        if (observed.contains(v)) {
          targets.insert(v);
        } else {
          next |= g.children(v);
        }
      }
      frontier = next - seen;
    }
    for (int b : targets) dir.emplace_back(g.name(a), g.name(b));
  }

  // Bidirected: a common hidden source, or an original bidirected edge whose
  // endpoints are a (or a hidden source of a) and b (or a hidden source of b).
  for (int a : observed) {
    for (int b : observed) {
      if (b <= a) continue;
      bool linked = hidden_sources[a].intersects(hidden_sources[b]);
      if (!linked) {
        VertexSet ends_a = hidden_sources[a] | VertexSet::single(a);
        VertexSet ends_b = hidden_sources[b] | VertexSet::single(b);
        for (int x : ends_a) {
          if (g.siblings(x).intersects(ends_b)) {
            linked = true;
            break;
          }
        }
      }
      if (linked) bi.emplace_back(g.name(a), g.name(b));
    }
  }
  return Admg(std::move(vs), dir, bi);
}

}  // namespace pathid
