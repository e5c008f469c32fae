#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pathid {

using NameList = std::vector<std::string>;

// Set of vertex indices of a single graph. Graphs are capped at 64 vertices.
class VertexSet {
 public:
  static constexpr int kCapacity = 64;

  constexpr VertexSet() = default;
  static constexpr VertexSet from_bits(std::uint64_t bits) {
    VertexSet s;
    s.bits_ = bits;
    return s;
  }
  static VertexSet single(int v) {
    VertexSet s;
    s.insert(v);
    return s;
  }
  static VertexSet range(int n) {
    return from_bits(n >= kCapacity ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1));
  }

  bool contains(int v) const { return (bits_ >> v) & 1U; }
  void insert(int v) { bits_ |= std::uint64_t{1} << v; }
  void erase(int v) { bits_ &= ~(std::uint64_t{1} << v); }
  bool empty() const { return bits_ == 0; }
  int size() const { return std::popcount(bits_); }
  std::uint64_t bits() const { return bits_; }
  int first() const { return std::countr_zero(bits_); }
  bool subset_of(VertexSet other) const { return (bits_ & ~other.bits_) == 0; }
  bool intersects(VertexSet other) const { return (bits_ & other.bits_) != 0; }

  VertexSet operator|(VertexSet o) const { return from_bits(bits_ | o.bits_); }
  VertexSet operator&(VertexSet o) const { return from_bits(bits_ & o.bits_); }
  VertexSet operator-(VertexSet o) const { return from_bits(bits_ & ~o.bits_); }
  VertexSet& operator|=(VertexSet o) {
    bits_ |= o.bits_;
    return *this;
  }
  VertexSet& operator&=(VertexSet o) {
    bits_ &= o.bits_;
    return *this;
  }
  VertexSet& operator-=(VertexSet o) {
    bits_ &= ~o.bits_;
    return *this;
  }
  friend bool operator==(VertexSet, VertexSet) = default;

  class iterator {
   public:
    explicit iterator(std::uint64_t rest) : rest_(rest) {}
    int operator*() const { return std::countr_zero(rest_); }
    iterator& operator++() {
      rest_ &= rest_ - 1;
      return *this;
    }
    bool operator!=(const iterator& o) const { return rest_ != o.rest_; }

   private:
    std::uint64_t rest_;
  };
  iterator begin() const { return iterator(bits_); }
  iterator end() const { return iterator(0); }

 private:
  std::uint64_t bits_ = 0;
};

struct Vertex {
  std::string name;
  int cardinality = 2;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

using Edge = std::pair<std::string, std::string>;

// Acyclic directed mixed graph. Immutable once constructed; the constructor
// validates names, edges and acyclicity.
class Admg {
 public:
  Admg() = default;
  Admg(std::vector<Vertex> vertices, const std::vector<Edge>& directed,
       const std::vector<Edge>& bidirected = {});

  int size() const { return static_cast<int>(vertices_.size()); }
  const std::vector<Vertex>& vertices() const { return vertices_; }
  const std::string& name(int v) const { return vertices_[v].name; }
  int cardinality(int v) const { return vertices_[v].cardinality; }
  int index(std::string_view name) const;
  std::optional<int> find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name).has_value(); }

  VertexSet all() const { return VertexSet::range(size()); }
  VertexSet parents(int v) const { return parents_[v]; }
  VertexSet children(int v) const { return children_[v]; }
  VertexSet siblings(int v) const { return siblings_[v]; }
  bool has_directed(int from, int to) const { return children_[from].contains(to); }
  bool has_bidirected(int a, int b) const { return siblings_[a].contains(b); }
  bool has_bidirected_edges() const;

  // Canonically ordered edge lists (by source index, then target index).
  std::vector<std::pair<int, int>> directed_edges() const;
  std::vector<std::pair<int, int>> bidirected_edges() const;

  VertexSet set_of(const NameList& names) const;
  NameList names(VertexSet s) const;

  // Subgraph over s, keeping declaration order.
  Admg induced(VertexSet s) const;

  friend bool operator==(const Admg& a, const Admg& b);

 private:
  std::vector<Vertex> vertices_;
  std::vector<VertexSet> parents_;
  std::vector<VertexSet> children_;
  std::vector<VertexSet> siblings_;
  std::map<std::string, int, std::less<>> index_;
};

// DAG (or ADMG) whose hidden vertices are marginalized by latent projection.
struct HiddenDag {
  Admg base;
  VertexSet hidden;

  HiddenDag() = default;
  HiddenDag(Admg graph, const NameList& hidden_names);
  VertexSet observed() const { return base.all() - hidden; }
  NameList hidden_names() const { return base.names(hidden); }
  bool is_hidden(int v) const { return hidden.contains(v); }
  friend bool operator==(const HiddenDag&, const HiddenDag&) = default;
};

// Deterministic topological order; ties go to the earliest declared vertex.
std::vector<int> topological_indices(const Admg& g);
NameList topological_order(const Admg& g);

// Position of each vertex in topological_indices(g).
std::vector<int> topological_rank(const Admg& g);

std::vector<VertexSet> districts(const Admg& g, VertexSet s);
std::vector<NameList> districts(const Admg& g, const NameList& s);

VertexSet ancestors(const Admg& g, VertexSet s);
VertexSet descendants(const Admg& g, VertexSet s);
VertexSet parents(const Admg& g, VertexSet s);
VertexSet children(const Admg& g, VertexSet s);
NameList ancestors(const Admg& g, const NameList& s);
NameList descendants(const Admg& g, const NameList& s);
NameList parents(const Admg& g, const NameList& s);
NameList children(const Admg& g, const NameList& s);

Admg latent_project(const HiddenDag& d);

}  // namespace pathid
