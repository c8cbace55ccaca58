#include "rigidlab/alpha.hpp"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <numeric>

namespace rigidlab {

Rational Rational::make(std::int64_t num, std::int64_t den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const std::int64_t g = std::gcd(num, den);
  if (g > 1) {
    num /= g;
    den /= g;
  }
  return {num, den};
}

std::string Rational::to_string() const {
  return std::to_string(num) + "/" + std::to_string(den);
}

WindowHitError::WindowHitError(std::int64_t num, std::int64_t den, ExtType at)
    : std::invalid_argument("alpha " + std::to_string(num) + "/" + std::to_string(den) +
                            " hits the window at (v,e)=(" + std::to_string(at.v) + "," +
                            std::to_string(at.e) + "): v - alpha e = 0"),
      at(at) {}

AlphaParam validate_alpha(std::int64_t num, std::int64_t den, std::uint32_t v_max,
                          std::uint32_t e_max) {
  if (num <= 0 || den <= 0 || num >= den)
    throw std::invalid_argument("alpha must satisfy 0 < num < den");
  if (v_max < 1 || e_max < 1) throw std::invalid_argument("window bounds must be >= 1");
  const Rational r = Rational::make(num, den);
  AlphaParam a;
  a.num = r.num;
  a.den = r.den;
  a.v_max = v_max;
  a.e_max = e_max;
  a.zeta_scaled = -1;
  for (std::uint32_t v = 0; v <= v_max; ++v) {
    for (std::uint32_t e = 0; e <= e_max; ++e) {
      if (v == 0 && e == 0) continue;
      const std::int64_t d = std::llabs(a.scaled(v, e));
      if (d == 0) throw WindowHitError(a.num, a.den, {v, e});
      if (a.zeta_scaled < 0 || d < a.zeta_scaled) {
        a.zeta_scaled = d;
        a.zeta_at = {v, e};
      }
    }
  }
  return a;
}

AlphaParam default_alpha(std::int64_t num, std::int64_t den, std::uint32_t ell_star,
                         std::size_t q_size) {
  const std::uint64_t m = 2ULL * ell_star + q_size;
  const std::uint64_t e_max = m * (m - (m > 0 ? 1 : 0)) / 2;
  return validate_alpha(num, den, 2 * ell_star,
                        static_cast<std::uint32_t>(std::max<std::uint64_t>(1, e_max)));
}

ExtType ext_type(const PairSpec& p) {
  const Graph& g = p.ambient;
  if (!p.h0.is_subset_of(p.h1)) throw std::invalid_argument("H0 is not a subset of H1");
  for (Vertex v : p.h1)
    if (!g.contains(v)) throw GraphError("H1 vertex outside the ambient graph");
  ExtType t;
  for (Vertex v : p.h1)
    if (!p.h0.contains(v) && !g.in_q(v)) ++t.v;
  auto in_h1q = [&](Vertex x) { return g.in_q(x) || p.h1.contains(x); };
  auto in_h0q = [&](Vertex x) { return g.in_q(x) || p.h0.contains(x); };
  for (const Edge& e : g.edges())
    if (in_h1q(e.u) && in_h1q(e.v) && !(in_h0q(e.u) && in_h0q(e.v))) ++t.e;
  return t;
}

ExtensionProfile::ExtensionProfile(const Graph& g, const std::vector<Vertex>& new_vertices,
                                   const std::vector<std::uint8_t>& in_base) {
  const std::size_t d = new_vertices.size();
  if (d > kMaxNew) throw WindowExceededError("extension has too many new vertices");
  base_deg_.assign(d, 0);
  nbr_mask_.assign(d, 0);
  for (std::size_t i = 0; i < d; ++i) {
    for (Vertex w : g.neighbors(new_vertices[i]))
      if (in_base[w - 1]) ++base_deg_[i];
    for (std::size_t j = 0; j < d; ++j)
      if (j != i && g.is_edge(new_vertices[i], new_vertices[j]))
        nbr_mask_[i] |= std::uint32_t{1} << j;
  }
  edge_table_.assign(std::size_t{1} << d, 0);
  for (std::uint32_t mask = 1; mask < edge_table_.size(); ++mask) {
    const int low = std::countr_zero(mask);
    const std::uint32_t rest = mask & (mask - 1);
    edge_table_[mask] =
        edge_table_[rest] + base_deg_[low] + std::popcount(nbr_mask_[low] & rest);
  }
}

ExtType ExtensionProfile::type_of(std::uint32_t mask) const {
  return {static_cast<std::uint32_t>(std::popcount(mask)), edge_table_[mask]};
}

bool ExtensionProfile::is_rigid(const AlphaParam& a, std::uint32_t mask) const {
  if (mask == 0) return false;
  const std::int64_t v_all = std::popcount(mask);
  const std::int64_t e_all = edge_table_[mask];
  // Proper submasks of mask, including 0.
  for (std::uint32_t sub = (mask - 1) & mask;; sub = (sub - 1) & mask) {
    const std::int64_t v = v_all - std::popcount(sub);
    const std::int64_t e = e_all - edge_table_[sub];
    if (a.scaled(v, e) >= 0) return false;
    if (sub == 0) break;
  }
  return true;
}

bool ExtensionProfile::is_safe(const AlphaParam& a) const {
  for (std::uint32_t mask = 1; mask < edge_table_.size(); ++mask)
    if (a.scaled(std::popcount(mask), edge_table_[mask]) <= 0) return false;
  return true;
}

bool ExtensionProfile::is_hinged(const AlphaParam& a) const {
  const std::uint32_t full = full_mask();
  if (!is_rigid(a, full)) return false;
  for (std::uint32_t mask = 1; mask < full; ++mask)
    if (is_rigid(a, mask)) return false;
  return true;
}

Classification classify_pair(const PairSpec& p, const AlphaParam& a) {
  const Graph& g = p.ambient;
  Classification c;
  c.ext_type = ext_type(p);
  if (!a.in_window(c.ext_type))
    throw WindowExceededError("type (" + std::to_string(c.ext_type.v) + "," +
                              std::to_string(c.ext_type.e) +
                              ") lies outside the alpha certificate window");
  const std::int64_t scaled = a.scaled(c.ext_type.v, c.ext_type.e);
  c.value = Rational::make(scaled, a.den);
  c.dense = scaled < 0;
  c.sparse = scaled > 0;

  std::vector<std::uint8_t> in_base(g.order(), 0);
  std::vector<Vertex> fresh;
  for (Vertex v = 1; v <= g.order(); ++v)
    if (g.in_q(v) || p.h0.contains(v)) in_base[v - 1] = 1;
  for (Vertex v : p.h1)
    if (!in_base[v - 1]) fresh.push_back(v);

  const ExtensionProfile profile(g, fresh, in_base);
  c.safe = profile.is_safe(a);
  c.rigid = profile.is_rigid(a);
  c.hinged = c.rigid && profile.is_hinged(a);
  return c;
}

}  // namespace rigidlab
