#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rigidlab {

// Vertices are 1-based, matching [n] = {1, ..., n}.
using Vertex = std::uint32_t;

struct Edge {
  Vertex u = 0;
  Vertex v = 0;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

class GraphError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Sorted, duplicate-free set of vertices.
class VertexSet {
 public:
  VertexSet() = default;
  VertexSet(std::initializer_list<Vertex> members);
  explicit VertexSet(std::vector<Vertex> members);

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  bool contains(Vertex v) const;
  bool is_subset_of(const VertexSet& other) const;

  const std::vector<Vertex>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }
  Vertex operator[](std::size_t i) const { return members_[i]; }

  VertexSet united(const VertexSet& other) const;
  VertexSet minus(const VertexSet& other) const;
  VertexSet intersected(const VertexSet& other) const;

  // Comma-separated ids, "-" when empty.
  std::string to_string() const;
  static VertexSet parse(const std::string& text);

  friend bool operator==(const VertexSet&, const VertexSet&) = default;
  friend auto operator<=>(const VertexSet& a, const VertexSet& b) {
    return a.members_ <=> b.members_;
  }

 private:
  std::vector<Vertex> members_;
};

// Immutable simple graph on [n] with a distinguished vertex set Q.
// Adjacency is kept twice: a bit matrix for O(1) membership tests and a
// CSR neighbour array for sparse iteration.
class Graph {
 public:
  Graph() = default;

  std::size_t order() const { return n_; }
  // Only induced_subgraph(G, {}) yields an order-0 graph.
  bool is_empty_sentinel() const { return n_ == 0; }

  bool is_edge(Vertex u, Vertex v) const {
    const std::size_t i = u - 1, j = v - 1;
    return (adj_[i * words_ + (j >> 6)] >> (j & 63)) & 1U;
  }
  bool in_q(Vertex v) const { return q_mask_[v - 1] != 0; }
  bool contains(Vertex v) const { return v >= 1 && v <= n_; }

  std::span<const Vertex> neighbors(Vertex v) const {
    return {nbrs_.data() + offsets_[v - 1], nbrs_.data() + offsets_[v]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v] - offsets_[v - 1]; }

  const VertexSet& q_set() const { return q_; }
  // Sorted (u < v) edge list.
  const std::vector<Edge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::vector<Edge> q_edges() const;

  // Row of the bit matrix for v: words() 64-bit words, bit j-1 is vertex j.
  std::span<const std::uint64_t> row(Vertex v) const {
    return {adj_.data() + (v - 1) * words_, words_};
  }
  std::size_t words() const { return words_; }

  // Same vertices and edges, different Q.
  Graph with_q(const VertexSet& q) const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.n_ == b.n_ && a.q_ == b.q_ && a.edges_ == b.edges_;
  }

 private:
  friend Graph build_graph(std::size_t, const std::vector<Edge>&,
                           const VertexSet&);
  friend Graph make_graph_unchecked(std::size_t, std::vector<Edge>,
                                    const VertexSet&);

  std::size_t n_ = 0;
  std::size_t words_ = 0;
  std::vector<std::uint64_t> adj_;
  std::vector<std::uint8_t> q_mask_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> nbrs_;
  std::vector<Edge> edges_;
  VertexSet q_;
};

// Validates endpoints and rejects self-loops; duplicate or reversed pairs
// are merged.
Graph build_graph(std::size_t n, const std::vector<Edge>& edges,
                  const VertexSet& q_set = {});

// Fast path for producers that already guarantee valid, sorted, unique
// edges with u < v.
Graph make_graph_unchecked(std::size_t n, std::vector<Edge> sorted_edges,
                           const VertexSet& q_set);

struct InducedSubgraph {
  Graph graph;
  // relabel[i] is the original vertex of new vertex i + 1.
  std::vector<Vertex> relabel;
  bool empty = false;

  Vertex original(Vertex v) const { return relabel[v - 1]; }
  // 0 when v is not part of the subgraph.
  Vertex local(Vertex original_vertex) const;
};

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s);

// Lexicographic enumeration of vertex sets S, disjoint from `exclude`, with
// 1 <= |S| <= k, ordered by size first. `allow` optionally filters vertices.
class ExtensionEnumerator {
 public:
  using VertexFilter = std::function<bool(Vertex)>;

  ExtensionEnumerator(const Graph& g, const VertexSet& exclude, std::size_t k,
                      VertexFilter allow = {});

  bool next(VertexSet& out);

 private:
  std::vector<Vertex> pool_;
  std::size_t k_;
  std::size_t size_ = 0;
  std::vector<std::size_t> idx_;
};

std::vector<VertexSet> enumerate_extensions(
    const Graph& g, const VertexSet& exclude, std::size_t k,
    ExtensionEnumerator::VertexFilter allow = {});

// Edge-list text format:
//   n <n> q <comma-separated Q or ->
//   u v
//   ...
// Pair templates carry two more header tokens: h0 <ids> h1 <ids>.
struct GraphText {
  Graph graph;
  std::vector<std::pair<std::string, VertexSet>> extra_sets;

  const VertexSet* find(const std::string& key) const;
};

void write_graph(std::ostream& out, const Graph& g,
                 const std::vector<std::pair<std::string, VertexSet>>& extra =
                     {});
std::string graph_to_string(const Graph& g);
GraphText read_graph(std::istream& in);
GraphText read_graph_file(const std::string& path);

}  // namespace rigidlab
