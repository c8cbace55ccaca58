#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "rigidlab/alpha.hpp"
#include "rigidlab/graph.hpp"

namespace rigidlab {

// SplitMix64 finalizer (Steele, Lea, Flood 2014). Every per-trial stream is
// seeded with mix64 applied along (master_seed, n, trial_index, salt).
std::uint64_t mix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t n, std::uint64_t trial_index,
                          std::uint64_t salt = 0);

// Stream salts, so graph sampling and auxiliary draws never share a stream.
inline constexpr std::uint64_t kGraphStream = 0;
inline constexpr std::uint64_t kEmbeddingStream = 1;
inline constexpr std::uint64_t kEventStream = 2;

// Uniform double in (0, 1], from the top 53 bits.
double uniform_open_closed(std::mt19937_64& rng);

// p_n = n^(-num/den), computed in long double.
double edge_probability(std::size_t n, const AlphaParam& alpha);

struct QSpec {
  VertexSet vertices;
  std::vector<Edge> edges;
};

struct SampleConfig {
  std::size_t n = 0;
  AlphaParam alpha;
  std::optional<QSpec> q_spec;
  std::uint64_t master_seed = 0;
  std::uint64_t trial_index = 0;
};

// Each pair {i<j} is an edge independently with probability n^-alpha. Pairs
// are visited in lexicographic order with geometric skips, so the map from
// the random stream to the graph is fixed.
Graph sample_graph(const SampleConfig& cfg);

// As sample_graph, but the pairs inside Q are taken from q_spec verbatim and
// the result carries Q. With Q empty the output equals sample_graph's.
Graph sample_conditioned(const SampleConfig& cfg);

// g with additional edges.
Graph with_planted(const Graph& g, const std::vector<Edge>& edges);
std::vector<Edge> clique_edges(const VertexSet& vertices);

}  // namespace rigidlab
