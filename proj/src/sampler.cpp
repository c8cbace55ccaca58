#include "rigidlab/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rigidlab {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t n, std::uint64_t trial_index,
                          std::uint64_t salt) {
  std::uint64_t s = mix64(master_seed);
  s = mix64(s ^ n);
  s = mix64(s ^ trial_index);
  return mix64(s ^ salt);
}

double uniform_open_closed(std::mt19937_64& rng) {
  return static_cast<double>((rng() >> 11) + 1) * 0x1.0p-53;
}

double edge_probability(std::size_t n, const AlphaParam& alpha) {
  const long double a = static_cast<long double>(alpha.num) / static_cast<long double>(alpha.den);
  return static_cast<double>(std::exp(-a * std::log(static_cast<long double>(n))));
}

namespace {

Graph sample_impl(const SampleConfig& cfg, const VertexSet* q, const std::vector<Edge>* q_edges) {
  const std::size_t n = cfg.n;
  if (n == 0) throw std::invalid_argument("sample size n must be >= 1");
  std::vector<std::uint8_t> in_q(n + 1, 0);
  if (q)
    for (Vertex v : *q) in_q[v] = 1;

  std::vector<Edge> edges;
  if (n >= 2) {
    const double p = edge_probability(n, cfg.alpha);
    const double log_miss = std::log1p(-p);
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - 1) / 2;
    std::mt19937_64 rng(derive_seed(cfg.master_seed, n, cfg.trial_index, kGraphStream));
    edges.reserve(static_cast<std::size_t>(static_cast<double>(total) * p * 1.1) + 16);

    // Row i (1-based) holds pairs (i, i+1..n); row_start is its first index.
    Vertex row = 1;
    std::uint64_t row_start = 0;
    std::uint64_t index = 0;
    bool first = true;
    for (;;) {
      const double skip = std::floor(std::log(uniform_open_closed(rng)) / log_miss);
      const double room = static_cast<double>(total - index);
      if (skip >= room) break;
      const std::uint64_t step = static_cast<std::uint64_t>(skip) + (first ? 0 : 1);
      first = false;
      if (step >= total - index) break;
      index += step;
      while (index >= row_start + (n - row)) {
        row_start += n - row;
        ++row;
      }
      const Vertex col = static_cast<Vertex>(row + 1 + (index - row_start));
      if (!(in_q[row] && in_q[col])) edges.push_back({row, col});
    }
  }
  if (q_edges) {
    edges.insert(edges.end(), q_edges->begin(), q_edges->end());
    for (Edge& e : edges)
      if (e.u > e.v) std::swap(e.u, e.v);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  }
  return make_graph_unchecked(n, std::move(edges), q ? *q : VertexSet{});
}

}  // namespace

Graph sample_graph(const SampleConfig& cfg) { return sample_impl(cfg, nullptr, nullptr); }

Graph sample_conditioned(const SampleConfig& cfg) {
  if (!cfg.q_spec) throw std::invalid_argument("conditioned sampling needs a Q specification");
  const QSpec& qs = *cfg.q_spec;
  for (Vertex v : qs.vertices)
    if (v > cfg.n) throw GraphError("Q vertex " + std::to_string(v) + " outside [n]");
  for (const Edge& e : qs.edges) {
    if (!qs.vertices.contains(e.u) || !qs.vertices.contains(e.v))
      throw GraphError("Q edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       "} has an endpoint outside Q");
    if (e.u == e.v) throw GraphError("self-loop in Q edges");
  }
  return sample_impl(cfg, &qs.vertices, &qs.edges);
}

Graph with_planted(const Graph& g, const std::vector<Edge>& edges) {
  std::vector<Edge> all = g.edges();
  all.insert(all.end(), edges.begin(), edges.end());
  return build_graph(g.order(), all, g.q_set());
}

std::vector<Edge> clique_edges(const VertexSet& vertices) {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < vertices.size(); ++i)
    for (std::size_t j = i + 1; j < vertices.size(); ++j) out.push_back({vertices[i], vertices[j]});
  return out;
}

}  // namespace rigidlab
