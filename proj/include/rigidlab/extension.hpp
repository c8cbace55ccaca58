#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rigidlab/alpha.hpp"
#include "rigidlab/graph.hpp"

namespace rigidlab {

// Injective map from template vertices to ambient vertices. Template Q
// vertices that are left unmapped are aligned by label (identity on Q).
class Embedding {
 public:
  Embedding() = default;
  Embedding(std::initializer_list<std::pair<const Vertex, Vertex>> init) : map_(init) {}

  void set(Vertex template_vertex, Vertex ambient_vertex) { map_[template_vertex] = ambient_vertex; }
  std::optional<Vertex> get(Vertex template_vertex) const;
  const std::map<Vertex, Vertex>& entries() const { return map_; }
  VertexSet image() const;

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::map<Vertex, Vertex> map_;
};

class EmbeddingError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Number of injective g on H1 u Q extending f such that every template edge
// with an endpoint in H1 \ H0 \ Q (and both endpoints in H1 u Q) maps onto an
// edge of g. New vertices map outside Q and outside f's image. Non-edges are
// not constrained. Throws std::overflow_error past 2^64 - 1.
std::uint64_t count_extensions(const Graph& g, const Embedding& f, const PairSpec& p);
bool has_extension(const Graph& g, const Embedding& f, const PairSpec& p);

// Calls `visit` with each full extension until it returns false. With an rng
// the candidate order at every step is shuffled.
void for_each_extension(const Graph& g, const Embedding& f, const PairSpec& p,
                        const std::function<bool(const Embedding&)>& visit,
                        std::mt19937_64* rng = nullptr);

// Some embedding of h0 into g (edges of h0 outside Q must map to edges),
// found by a shuffled search; nullopt when h0 does not embed.
std::optional<Embedding> random_embedding(const Graph& g, const Graph& tmpl,
                                          const VertexSet& h0, std::mt19937_64& rng);

// Number of permutations of H1 \ H0 \ Q fixing everything else that map the
// template's new edges onto new edges.
std::uint64_t extension_automorphisms(const PairSpec& p);

struct KernelResult {
  VertexSet kernel;
  std::size_t rounds = 0;
  std::vector<VertexSet> additions_per_round;
  bool truncated = false;
  std::size_t candidates_examined = 0;
};

// Round cap of 2^depth for a sentence of quantifier depth `depth`.
std::size_t round_cap_for_depth(std::size_t depth);

// All connected T outside base u Q with 1 <= |T| <= ell such that
// (base, base u T) is rigid in g (Q is always on the base side). Every rigid
// extension is a disjoint union of these. Ordered by size, then
// lexicographically. `within`, when given, restricts T to those vertices.
std::vector<VertexSet> rigid_extensions(const Graph& g, const VertexSet& base,
                                        std::size_t ell, const AlphaParam& a,
                                        const VertexSet* within = nullptr,
                                        std::size_t* examined = nullptr);

// Least fixed point of X -> X u U{H : X c H, |H \ X| <= ell, (X,H) rigid}.
// round_cap = 0 means n rounds.
KernelResult closure(const Graph& g, const VertexSet& x, std::size_t ell,
                     const AlphaParam& a, std::size_t round_cap = 0);

// Closure of the empty set (over Q).
KernelResult rigid_kernel(const Graph& g, std::size_t ell_star, const AlphaParam& a,
                          std::size_t round_cap = 0);

struct RigidChain {
  struct Entry {
    VertexSet vertices;
    ExtType type;
  };
  std::vector<Entry> entries;
};

// Greedy split of the kernel into rigid steps of at most ell_star vertices,
// each over the union of the previous steps; smallest then lexicographically
// first step wins.
RigidChain extract_rigid_chain(const Graph& g, const KernelResult& kr,
                               std::size_t ell_star, const AlphaParam& a);

enum class EventKind { no_rigid_from_base, generic_extension };

struct EventReport {
  struct Counterexample {
    VertexSet h0;
    VertexSet h1;
    std::string template_code;
  };

  EventKind event = EventKind::no_rigid_from_base;
  bool holds = true;
  std::size_t witnesses_checked = 0;
  std::size_t failures = 0;
  // budget was zero: holds only vacuously.
  bool vacuous = false;
  std::optional<Counterexample> counterexample;
};

std::string to_string(EventKind kind);

// No rigid (Q, Q u T) with 1 <= |T| <= ell_star occurs in g.
EventReport check_no_rigid_from_base(const Graph& g, std::size_t ell_star,
                                     const AlphaParam& a);

// Template pair (H0, H1) over an empty Q: vertices 1..k, H0 = {1..h0_size}.
struct TemplatePair {
  Graph graph;
  std::size_t h0_size = 0;
  std::string code;
  Classification classification;

  PairSpec spec() const;
};

// Isomorphism types of pairs with |H1| <= ell and at least one new vertex,
// deduplicated by canonical code. ell is capped at kMaxCatalogSize.
inline constexpr std::size_t kMaxCatalogSize = 6;
std::vector<TemplatePair> pair_catalog(std::size_t ell, const AlphaParam& a, bool safe_only);

// One generic-extension obligation: some extension g of f to H1 has
// cl(g(H1)) = g(H1) u cl(f(H0)). At most `tries` extensions are examined.
bool generic_obligation_met(const Graph& g, const PairSpec& p, const Embedding& f,
                            std::size_t ell_star, const AlphaParam& a,
                            std::mt19937_64& rng, std::size_t tries = 64);

// Samples `budget` (safe template, embedding) obligations. Sampling, not
// exhaustive checking.
EventReport check_generic_ext(const Graph& g, std::size_t ell_star, const AlphaParam& a,
                              std::size_t budget, std::uint64_t seed,
                              std::size_t tries = 64);

}  // namespace rigidlab
