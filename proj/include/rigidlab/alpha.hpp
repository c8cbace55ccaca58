#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidlab/graph.hpp"

namespace rigidlab {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t num, std::int64_t den);
  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string to_string() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

struct ExtType {
  std::uint32_t v = 0;
  std::uint32_t e = 0;

  friend bool operator==(const ExtType&, const ExtType&) = default;
};

// alpha = num/den checked to satisfy v*den != e*num on the window
// 0 <= v <= v_max, 0 <= e <= e_max, (v,e) != (0,0). That is the only
// property of an irrational exponent the extension calculus relies on.
struct AlphaParam {
  std::int64_t num = 0;
  std::int64_t den = 1;
  std::uint32_t v_max = 0;
  std::uint32_t e_max = 0;
  // zeta = zeta_scaled / den = min |v - alpha e| over the window.
  std::int64_t zeta_scaled = 0;
  ExtType zeta_at;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  Rational zeta() const { return Rational::make(zeta_scaled, den); }

  // v*den - e*num, the scaled value of v - alpha e.
  std::int64_t scaled(std::int64_t v, std::int64_t e) const { return v * den - e * num; }
  bool in_window(const ExtType& t) const { return t.v <= v_max && t.e <= e_max; }
  // Smallest e with 1 - alpha e < 0, i.e. floor(1/alpha) + 1.
  std::uint32_t min_rigid_degree() const {
    return static_cast<std::uint32_t>(den / num + 1);
  }
};

class WindowHitError : public std::invalid_argument {
 public:
  WindowHitError(std::int64_t num, std::int64_t den, ExtType at);
  ExtType at;
};

class WindowExceededError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Rejects alpha when some (v,e) in the window has v = alpha e; otherwise
// returns the certificate with the exact gap. num/den is reduced first.
AlphaParam validate_alpha(std::int64_t num, std::int64_t den, std::uint32_t v_max,
                          std::uint32_t e_max);

// Window used when none is given: v_max = 2 ell, e_max = C(2 ell + |Q|, 2).
AlphaParam default_alpha(std::int64_t num, std::int64_t den, std::uint32_t ell_star,
                         std::size_t q_size = 0);

struct PairSpec {
  Graph ambient;
  VertexSet h0;
  VertexSet h1;
};

// v = |H1 \ H0 \ Q|; e = edges inside H1 u Q but not inside H0 u Q.
ExtType ext_type(const PairSpec& p);

struct Classification {
  ExtType ext_type;
  Rational value;
  bool dense = false;
  bool sparse = false;
  bool safe = false;
  bool rigid = false;
  bool hinged = false;
};

// Edge statistics of an extension over a base B (B already contains Q).
// New vertices are indexed 0..d-1; a subset of them is a bitmask.
class ExtensionProfile {
 public:
  static constexpr std::size_t kMaxNew = 20;

  ExtensionProfile(const Graph& g, const std::vector<Vertex>& new_vertices,
                   const std::vector<std::uint8_t>& in_base);

  std::size_t size() const { return base_deg_.size(); }
  std::uint32_t full_mask() const { return (std::uint32_t{1} << size()) - 1; }
  // Edges with an endpoint in `mask` and the other in B or `mask`.
  std::uint32_t edges(std::uint32_t mask) const { return edge_table_[mask]; }
  ExtType type_of(std::uint32_t mask) const;

  // (B u sub, B u mask) is dense for every proper sub of mask.
  bool is_rigid(const AlphaParam& a, std::uint32_t mask) const;
  bool is_rigid(const AlphaParam& a) const { return is_rigid(a, full_mask()); }
  // (B, B u sub) is sparse for every nonempty sub.
  bool is_safe(const AlphaParam& a) const;
  bool is_hinged(const AlphaParam& a) const;

 private:
  std::vector<std::uint32_t> base_deg_;
  std::vector<std::uint32_t> nbr_mask_;
  std::vector<std::uint32_t> edge_table_;
};

// Intermediate sets range over subsets of H1 \ H0 \ Q. A pair with H1 = H0
// (up to Q) is safe and not rigid.
Classification classify_pair(const PairSpec& p, const AlphaParam& a);

}  // namespace rigidlab
