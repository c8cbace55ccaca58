#include "rigidlab/extension.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <numeric>
#include <set>
#include <stdexcept>

#include "rigidlab/canonical.hpp"

namespace rigidlab {

std::optional<Vertex> Embedding::get(Vertex template_vertex) const {
  auto it = map_.find(template_vertex);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

VertexSet Embedding::image() const {
  std::vector<Vertex> out;
  for (const auto& [t, v] : map_) out.push_back(v);
  return VertexSet(std::move(out));
}

namespace {

// Backtracking search for extensions of f. Template vertices get positions:
// fixed ones (H0 u Q) first, then the new ones in search order. New vertices
// without any new edge ("free") are placed last so counting can finish them
// with a falling factorial.
class ExtensionSearch {
 public:
  ExtensionSearch(const Graph& g, const Embedding& f, const PairSpec& p) : g_(g) {
    const Graph& t = p.ambient;
    if (!p.h0.is_subset_of(p.h1)) throw std::invalid_argument("H0 is not a subset of H1");
    for (Vertex v : p.h1)
      if (!t.contains(v)) throw GraphError("H1 vertex outside the template");
    for (const auto& [tv, av] : f.entries()) {
      if (!p.h0.contains(tv) && !(t.contains(tv) && t.in_q(tv)))
        throw EmbeddingError("f is defined on template vertex " + std::to_string(tv) +
                             " outside H0 u Q");
    }

    std::vector<Vertex> fixed;
    for (Vertex v : p.h0) fixed.push_back(v);
    for (Vertex q : t.q_set())
      if (!p.h0.contains(q)) fixed.push_back(q);
    std::vector<Vertex> fresh;
    for (Vertex v : p.h1)
      if (!p.h0.contains(v) && !t.in_q(v)) fresh.push_back(v);

    used_.assign(g.order() + 1, 0);
    for (Vertex tv : fixed) {
      const bool q = t.in_q(tv);
      Vertex av = 0;
      if (auto img = f.get(tv)) {
        av = *img;
      } else if (q) {
        av = tv;
      } else {
        throw EmbeddingError("f does not cover H0 vertex " + std::to_string(tv));
      }
      if (!g.contains(av))
        throw EmbeddingError("f maps " + std::to_string(tv) + " outside the ambient graph");
      if (q && !g.in_q(av))
        throw EmbeddingError("template Q vertex " + std::to_string(tv) +
                             " must map into the ambient Q");
      if (!q && g.in_q(av))
        throw EmbeddingError("non-Q vertex " + std::to_string(tv) + " maps into Q");
      if (used_[av]) throw EmbeddingError("f is not injective");
      used_[av] = 1;
      if (!q) ++used_outside_q_;
      position_.emplace(tv, positions_.size());
      positions_.push_back(tv);
      image_.push_back(av);
    }

    // New edges: template edges touching a new vertex, inside H1 u Q.
    auto in_h1q = [&](Vertex x) { return t.in_q(x) || p.h1.contains(x); };
    std::map<Vertex, std::vector<Vertex>> adj;
    for (Vertex v : fresh) adj[v];
    for (const Edge& e : t.edges()) {
      if (!in_h1q(e.u) || !in_h1q(e.v)) continue;
      if (adj.count(e.u)) adj[e.u].push_back(e.v);
      if (adj.count(e.v)) adj[e.v].push_back(e.u);
    }

    std::set<Vertex> left(fresh.begin(), fresh.end());
    while (!left.empty()) {
      Vertex best = 0;
      std::size_t best_placed = 0, best_total = 0;
      for (Vertex v : left) {
        std::size_t placed = 0;
        for (Vertex w : adj[v]) placed += position_.count(w);
        const std::size_t total = adj[v].size();
        if (best == 0 || placed > best_placed ||
            (placed == best_placed && total > best_total)) {
          best = v;
          best_placed = placed;
          best_total = total;
        }
      }
      if (best_total == 0) break;
      std::vector<std::size_t> cons;
      for (Vertex w : adj[best])
        if (auto it = position_.find(w); it != position_.end()) cons.push_back(it->second);
      position_.emplace(best, positions_.size());
      positions_.push_back(best);
      constraints_.push_back(std::move(cons));
      left.erase(best);
    }
    first_slot_ = fixed.size();
    free_ = left.size();
    for (Vertex v : left) {
      position_.emplace(v, positions_.size());
      positions_.push_back(v);
      constraints_.emplace_back();
    }
    image_.resize(positions_.size(), 0);
    available_ = g.order() - g.q_set().size();
  }

  std::uint64_t count() { return count_from(0); }

  bool visit(const std::function<bool(const Embedding&)>& fn, std::mt19937_64* rng) {
    rng_ = rng;
    visitor_ = &fn;
    return visit_from(0);
  }

 private:
  std::size_t slots() const { return constraints_.size(); }

  template <class F>
  void for_each_candidate(std::size_t slot, F&& fn) {
    const auto& cons = constraints_[slot];
    auto ok = [&](Vertex c) {
      if (used_[c] || g_.in_q(c)) return false;
      for (std::size_t pos : cons)
        if (!g_.is_edge(image_[pos], c)) return false;
      return true;
    };
    std::vector<Vertex> cand;
    if (!cons.empty()) {
      std::size_t anchor = cons[0];
      for (std::size_t pos : cons)
        if (g_.degree(image_[pos]) < g_.degree(image_[anchor])) anchor = pos;
      for (Vertex c : g_.neighbors(image_[anchor]))
        if (ok(c)) cand.push_back(c);
    } else {
      for (Vertex c = 1; c <= g_.order(); ++c)
        if (ok(c)) cand.push_back(c);
    }
    if (rng_) std::shuffle(cand.begin(), cand.end(), *rng_);
    for (Vertex c : cand)
      if (!fn(c)) return;
  }

  std::uint64_t count_from(std::size_t slot) {
    if (slot + free_ == slots()) {
      // Remaining new vertices are unconstrained: falling factorial.
      std::uint64_t avail = available_ - used_outside_q_;
      std::uint64_t ways = 1;
      for (std::size_t i = 0; i < free_; ++i) {
        if (avail < i + 1) return 0;
        if (__builtin_mul_overflow(ways, avail - i, &ways))
          throw std::overflow_error("extension count exceeds 64 bits");
      }
      return ways;
    }
    std::uint64_t total = 0;
    const std::size_t pos = first_slot_ + slot;
    for_each_candidate(slot, [&](Vertex c) {
      place(pos, c);
      const std::uint64_t sub = count_from(slot + 1);
      unplace(pos, c);
      if (__builtin_add_overflow(total, sub, &total))
        throw std::overflow_error("extension count exceeds 64 bits");
      return true;
    });
    return total;
  }

  bool visit_from(std::size_t slot) {
    if (slot == slots()) {
      Embedding e;
      for (std::size_t i = 0; i < positions_.size(); ++i) e.set(positions_[i], image_[i]);
      return (*visitor_)(e);
    }
    bool keep_going = true;
    const std::size_t pos = first_slot_ + slot;
    for_each_candidate(slot, [&](Vertex c) {
      place(pos, c);
      keep_going = visit_from(slot + 1);
      unplace(pos, c);
      return keep_going;
    });
    return keep_going;
  }

  void place(std::size_t pos, Vertex c) {
    image_[pos] = c;
    used_[c] = 1;
    ++used_outside_q_;
  }
  void unplace(std::size_t pos, Vertex c) {
    image_[pos] = 0;
    used_[c] = 0;
    --used_outside_q_;
  }

  const Graph& g_;
  std::vector<Vertex> positions_;
  std::map<Vertex, std::size_t> position_;
  std::vector<Vertex> image_;
  std::vector<std::vector<std::size_t>> constraints_;
  std::vector<std::uint8_t> used_;
  std::size_t first_slot_ = 0;
  std::size_t free_ = 0;
  std::size_t used_outside_q_ = 0;
  std::size_t available_ = 0;
  std::mt19937_64* rng_ = nullptr;
  const std::function<bool(const Embedding&)>* visitor_ = nullptr;
};

}  // namespace

std::uint64_t count_extensions(const Graph& g, const Embedding& f, const PairSpec& p) {
  return ExtensionSearch(g, f, p).count();
}

bool has_extension(const Graph& g, const Embedding& f, const PairSpec& p) {
  bool found = false;
  for_each_extension(g, f, p, [&](const Embedding&) {
    found = true;
    return false;
  });
  return found;
}

void for_each_extension(const Graph& g, const Embedding& f, const PairSpec& p,
                        const std::function<bool(const Embedding&)>& visit,
                        std::mt19937_64* rng) {
  ExtensionSearch(g, f, p).visit(visit, rng);
}

std::optional<Embedding> random_embedding(const Graph& g, const Graph& tmpl,
                                          const VertexSet& h0, std::mt19937_64& rng) {
  const PairSpec p{tmpl, {}, h0};
  std::optional<Embedding> out;
  for_each_extension(g, Embedding{}, p, [&](const Embedding& e) {
    Embedding restricted;
    for (Vertex v : h0) restricted.set(v, *e.get(v));
    out = std::move(restricted);
    return false;
  }, &rng);
  return out;
}

std::uint64_t extension_automorphisms(const PairSpec& p) {
  const Graph& t = p.ambient;
  std::vector<Vertex> fresh;
  for (Vertex v : p.h1)
    if (!p.h0.contains(v) && !t.in_q(v)) fresh.push_back(v);
  auto in_h1q = [&](Vertex x) { return t.in_q(x) || p.h1.contains(x); };
  auto is_new = [&](Vertex x) { return std::binary_search(fresh.begin(), fresh.end(), x); };
  std::vector<Edge> new_edges;
  for (const Edge& e : t.edges())
    if (in_h1q(e.u) && in_h1q(e.v) && (is_new(e.u) || is_new(e.v))) new_edges.push_back(e);

  std::vector<Vertex> perm = fresh;
  std::uint64_t count = 0;
  do {
    auto map = [&](Vertex x) {
      auto it = std::lower_bound(fresh.begin(), fresh.end(), x);
      return (it != fresh.end() && *it == x) ? perm[static_cast<std::size_t>(it - fresh.begin())] : x;
    };
    bool ok = true;
    for (const Edge& e : new_edges)
      if (!t.is_edge(map(e.u), map(e.v))) {
        ok = false;
        break;
      }
    if (ok) ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return count;
}

std::size_t round_cap_for_depth(std::size_t depth) {
  return depth >= 63 ? SIZE_MAX : (std::size_t{1} << depth);
}

namespace {

constexpr std::size_t kMaxEll = 12;

// Search for rigid extensions of one base set. Only vertices that survive
// peeling (every member needs >= min_rigid_degree neighbours in base u T)
// can belong to a rigid T; connected T are enumerated with ESU.
class RigidSearch {
 public:
  RigidSearch(const Graph& g, const std::vector<std::uint8_t>& in_base, std::size_t ell,
              const AlphaParam& a, const std::vector<std::uint8_t>* within)
      : g_(g), in_base_(in_base), ell_(ell), a_(a) {
    if (ell > a.v_max)
      throw WindowExceededError("extension size bound exceeds the alpha window v_max");
    if (ell > kMaxEll) throw WindowExceededError("extension size bound too large");
    const std::size_t n = g.order();
    k_min_ = a.min_rigid_degree();
    base_deg_.assign(n + 1, 0);
    cand_.assign(n + 1, 0);
    for (Vertex v = 1; v <= n; ++v) {
      if (in_base[v - 1]) continue;
      if (within && !(*within)[v - 1]) continue;
      cand_[v] = 1;
    }
    std::vector<std::uint32_t> support(n + 1, 0);
    std::vector<Vertex> queue;
    for (Vertex v = 1; v <= n; ++v) {
      if (!cand_[v]) continue;
      for (Vertex w : g.neighbors(v)) {
        if (in_base[w - 1]) ++base_deg_[v];
        else if (cand_[w]) ++support[v];
      }
      if (base_deg_[v] + support[v] < k_min_) queue.push_back(v);
    }
    while (!queue.empty()) {
      const Vertex v = queue.back();
      queue.pop_back();
      if (!cand_[v]) continue;
      cand_[v] = 0;
      for (Vertex w : g.neighbors(v)) {
        if (!cand_[w]) continue;
        if (base_deg_[w] + --support[w] < k_min_) queue.push_back(w);
      }
    }
  }

  std::vector<VertexSet> run(std::size_t* examined) {
    std::vector<VertexSet> found;
    std::vector<Vertex> sub;
    std::vector<Vertex> ext;
    for (Vertex v = 1; v <= g_.order(); ++v) {
      if (!cand_[v]) continue;
      sub.assign(1, v);
      ext.clear();
      for (Vertex w : g_.neighbors(v))
        if (w > v && cand_[w]) ext.push_back(w);
      extend(sub, ext, v, found, examined);
    }
    std::sort(found.begin(), found.end(), [](const VertexSet& x, const VertexSet& y) {
      return x.size() != y.size() ? x.size() < y.size() : x < y;
    });
    return found;
  }

 private:
  void extend(std::vector<Vertex>& sub, std::vector<Vertex> ext, Vertex root,
              std::vector<VertexSet>& found, std::size_t* examined) {
    if (examined) ++*examined;
    if (is_rigid(sub)) found.emplace_back(sub);
    if (sub.size() == ell_) return;
    while (!ext.empty()) {
      const Vertex w = ext.back();
      ext.pop_back();
      std::vector<Vertex> next = ext;
      for (Vertex u : g_.neighbors(w)) {
        if (u <= root || !cand_[u]) continue;
        if (std::find(sub.begin(), sub.end(), u) != sub.end()) continue;
        if (std::find(next.begin(), next.end(), u) != next.end()) continue;
        bool adjacent_to_sub = false;
        for (Vertex s : sub)
          if (g_.is_edge(s, u)) {
            adjacent_to_sub = true;
            break;
          }
        if (!adjacent_to_sub) next.push_back(u);
      }
      sub.push_back(w);
      extend(sub, std::move(next), root, found, examined);
      sub.pop_back();
    }
  }

  bool is_rigid(const std::vector<Vertex>& t) const {
    const std::size_t d = t.size();
    std::array<std::uint32_t, kMaxEll> nbr{};
    for (std::size_t i = 0; i < d; ++i) {
      std::uint32_t deg = base_deg_[t[i]];
      for (std::size_t j = 0; j < d; ++j)
        if (j != i && g_.is_edge(t[i], t[j])) {
          nbr[i] |= std::uint32_t{1} << j;
          ++deg;
        }
      if (deg < k_min_) return false;
    }
    std::array<std::uint32_t, std::size_t{1} << kMaxEll> table;
    table[0] = 0;
    const std::uint32_t full = (std::uint32_t{1} << d) - 1;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
      const int low = std::countr_zero(mask);
      const std::uint32_t rest = mask & (mask - 1);
      table[mask] = table[rest] + base_deg_[t[static_cast<std::size_t>(low)]] +
                    static_cast<std::uint32_t>(std::popcount(nbr[static_cast<std::size_t>(low)] & rest));
    }
    for (std::uint32_t sub = full - 1;; --sub) {
      const std::int64_t v = static_cast<std::int64_t>(d) - std::popcount(sub);
      const std::int64_t e = static_cast<std::int64_t>(table[full]) - table[sub];
      if (a_.scaled(v, e) >= 0) return false;
      if (sub == 0) break;
    }
    return true;
  }

  const Graph& g_;
  const std::vector<std::uint8_t>& in_base_;
  std::size_t ell_;
  const AlphaParam& a_;
  std::uint32_t k_min_ = 0;
  std::vector<std::uint32_t> base_deg_;
  std::vector<std::uint8_t> cand_;
};

std::vector<std::uint8_t> base_mask(const Graph& g, const VertexSet& base) {
  std::vector<std::uint8_t> in_base(g.order(), 0);
  for (Vertex v : g.q_set()) in_base[v - 1] = 1;
  for (Vertex v : base) {
    if (!g.contains(v)) throw GraphError("vertex " + std::to_string(v) + " outside [n]");
    in_base[v - 1] = 1;
  }
  return in_base;
}

}  // namespace

std::vector<VertexSet> rigid_extensions(const Graph& g, const VertexSet& base,
                                        std::size_t ell, const AlphaParam& a,
                                        const VertexSet* within, std::size_t* examined) {
  const auto in_base = base_mask(g, base);
  std::vector<std::uint8_t> allowed;
  if (within) {
    allowed.assign(g.order(), 0);
    for (Vertex v : *within) allowed[v - 1] = 1;
  }
  RigidSearch search(g, in_base, ell, a, within ? &allowed : nullptr);
  return search.run(examined);
}

KernelResult closure(const Graph& g, const VertexSet& x, std::size_t ell,
                     const AlphaParam& a, std::size_t round_cap) {
  const std::size_t cap = round_cap == 0 ? g.order() : round_cap;
  KernelResult r;
  VertexSet current = x.minus(g.q_set());
  for (std::size_t j = 0;; ++j) {
    const auto found = rigid_extensions(g, current, ell, a, nullptr, &r.candidates_examined);
    if (found.empty()) break;
    if (j == cap) {
      r.truncated = true;
      break;
    }
    VertexSet added;
    for (const VertexSet& t : found) added = added.united(t);
    r.additions_per_round.push_back(added);
    current = current.united(added);
    ++r.rounds;
  }
  r.kernel = current;
  return r;
}

KernelResult rigid_kernel(const Graph& g, std::size_t ell_star, const AlphaParam& a,
                          std::size_t round_cap) {
  return closure(g, {}, ell_star, a, round_cap);
}

RigidChain extract_rigid_chain(const Graph& g, const KernelResult& kr, std::size_t ell_star,
                               const AlphaParam& a) {
  RigidChain chain;
  VertexSet covered;
  while (covered != kr.kernel) {
    const VertexSet rest = kr.kernel.minus(covered);
    const auto found = rigid_extensions(g, covered, ell_star, a, &rest);
    if (found.empty())
      throw std::logic_error("kernel is not a union of rigid steps of size <= ell*");
    const VertexSet& step = found.front();
    PairSpec p{g, covered, covered.united(step)};
    chain.entries.push_back({step, ext_type(p)});
    covered = covered.united(step);
  }
  return chain;
}

std::string to_string(EventKind kind) {
  return kind == EventKind::no_rigid_from_base ? "no_rigid_from_base" : "generic_extension";
}

EventReport check_no_rigid_from_base(const Graph& g, std::size_t ell_star,
                                     const AlphaParam& a) {
  EventReport r;
  r.event = EventKind::no_rigid_from_base;
  const auto found = rigid_extensions(g, {}, ell_star, a, nullptr, &r.witnesses_checked);
  r.failures = found.size();
  r.holds = found.empty();
  if (!r.holds) r.counterexample = EventReport::Counterexample{g.q_set(), g.q_set().united(found.front()), ""};
  return r;
}

PairSpec TemplatePair::spec() const {
  std::vector<Vertex> h0(h0_size);
  std::iota(h0.begin(), h0.end(), Vertex{1});
  std::vector<Vertex> h1(graph.order());
  std::iota(h1.begin(), h1.end(), Vertex{1});
  return {graph, VertexSet(std::move(h0)), VertexSet(std::move(h1))};
}

std::vector<TemplatePair> pair_catalog(std::size_t ell, const AlphaParam& a, bool safe_only) {
  if (ell > kMaxCatalogSize)
    throw std::length_error("pair catalog supports at most " + std::to_string(kMaxCatalogSize) +
                            " template vertices");
  std::vector<TemplatePair> out;
  std::set<std::string> seen;
  for (std::size_t k = 1; k <= ell; ++k) {
    std::vector<Edge> slots;
    for (Vertex i = 1; i <= k; ++i)
      for (Vertex j = i + 1; j <= k; ++j) slots.push_back({i, j});
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << slots.size()); ++bits) {
      std::vector<Edge> edges;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if ((bits >> s) & 1U) edges.push_back(slots[s]);
      const Graph graph = build_graph(k, edges);
      for (std::size_t h = 0; h < k; ++h) {
        std::vector<int> colors(k, 1);
        std::fill(colors.begin(), colors.begin() + static_cast<std::ptrdiff_t>(h), 0);
        std::string code = canonical_code(graph, colors);
        if (!seen.insert(code).second) continue;
        TemplatePair tp{graph, h, std::move(code), {}};
        const PairSpec p = tp.spec();
        if (!a.in_window(ext_type(p))) continue;
        tp.classification = classify_pair(p, a);
        if (safe_only && !tp.classification.safe) continue;
        out.push_back(std::move(tp));
      }
    }
  }
  return out;
}

bool generic_obligation_met(const Graph& g, const PairSpec& p, const Embedding& f,
                            std::size_t ell_star, const AlphaParam& a, std::mt19937_64& rng,
                            std::size_t tries) {
  std::vector<Vertex> h0_image;
  for (Vertex v : p.h0) h0_image.push_back(*f.get(v));
  const VertexSet base_closure = closure(g, VertexSet(std::move(h0_image)), ell_star, a).kernel;
  bool met = false;
  std::size_t examined = 0;
  for_each_extension(g, f, p, [&](const Embedding& ext) {
    std::vector<Vertex> img;
    for (Vertex v : p.h1) img.push_back(*ext.get(v));
    const VertexSet image(std::move(img));
    const VertexSet expected = image.united(base_closure).minus(g.q_set());
    if (closure(g, image, ell_star, a).kernel == expected) met = true;
    return !met && ++examined < tries;
  }, &rng);
  return met;
}

EventReport check_generic_ext(const Graph& g, std::size_t ell_star, const AlphaParam& a,
                              std::size_t budget, std::uint64_t seed, std::size_t tries) {
  EventReport r;
  r.event = EventKind::generic_extension;
  if (budget == 0) {
    r.vacuous = true;
    return r;
  }
  const auto catalog = pair_catalog(std::min(ell_star, kMaxCatalogSize), a, true);
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < budget; ++i) {
    const TemplatePair& tp = catalog[rng() % catalog.size()];
    const PairSpec p = tp.spec();
    ++r.witnesses_checked;
    const auto f = random_embedding(g, tp.graph, p.h0, rng);
    if (!f) continue;  // H0 does not embed: nothing to extend.
    if (generic_obligation_met(g, p, *f, ell_star, a, rng, tries)) continue;
    ++r.failures;
    r.holds = false;
    if (!r.counterexample) r.counterexample = EventReport::Counterexample{f->image(), {}, tp.code};
  }
  return r;
}

}  // namespace rigidlab
