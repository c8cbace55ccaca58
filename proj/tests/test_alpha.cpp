#include <gtest/gtest.h>

#include <numeric>
#include <random>

#include "oracles.hpp"
#include "rigidlab/alpha.hpp"

using namespace rigidlab;

namespace {

PairSpec pair(std::size_t n, std::vector<Edge> edges, VertexSet h0, VertexSet h1,
              VertexSet q = {}) {
  return PairSpec{build_graph(n, edges, q), std::move(h0), std::move(h1)};
}

std::vector<Edge> clique(Vertex k) {
  std::vector<Edge> e;
  for (Vertex u = 1; u <= k; ++u)
    for (Vertex v = u + 1; v <= k; ++v) e.push_back({u, v});
  return e;
}

}  // namespace

TEST(ValidateAlpha, ZetaAt79) {
  const AlphaParam a = validate_alpha(79, 100, 8, 28);
  EXPECT_EQ(a.zeta(), Rational::make(5, 100));
  EXPECT_EQ(a.zeta_at, (ExtType{4, 5}));
  const auto o = oracle::exhaustive_zeta(79, 100, 8, 28);
  EXPECT_EQ(a.zeta_scaled, o.gap);
  EXPECT_EQ(static_cast<long>(a.zeta_at.v), o.v);
  EXPECT_EQ(static_cast<long>(a.zeta_at.e), o.e);
}

TEST(ValidateAlpha, HalfHitsWindow) {
  try {
    validate_alpha(1, 2, 4, 12);
    FAIL() << "expected a window hit";
  } catch (const WindowHitError& e) {
    EXPECT_EQ(e.at, (ExtType{1, 2}));
    EXPECT_NE(std::string(e.what()).find("(1,2)"), std::string::npos);
  }
}

TEST(ValidateAlpha, Prime701) {
  const AlphaParam a = validate_alpha(701, 1000, 8, 28);
  const auto o = oracle::exhaustive_zeta(701, 1000, 8, 28);
  EXPECT_EQ(a.zeta_scaled, o.gap);
  EXPECT_GT(a.zeta_scaled, 0);
}

TEST(ValidateAlpha, BadInput) {
  EXPECT_THROW(validate_alpha(0, 5, 2, 2), std::invalid_argument);
  EXPECT_THROW(validate_alpha(5, 5, 2, 2), std::invalid_argument);
  EXPECT_THROW(validate_alpha(6, 5, 2, 2), std::invalid_argument);
  EXPECT_THROW(validate_alpha(1, 3, 0, 0), std::invalid_argument);
}

TEST(ValidateAlpha, ReducesFraction) {
  const AlphaParam a = validate_alpha(158, 200, 8, 28);
  EXPECT_EQ(a.num, 79);
  EXPECT_EQ(a.den, 100);
}

TEST(ValidateAlpha, ZetaMatchesOracleOnManyFractions) {
  for (long den = 2; den <= 40; ++den) {
    for (long num = 1; num < den; ++num) {
      const auto o = oracle::exhaustive_zeta(num, den, 4, 6);
      if (std::gcd(num, den) != 1) continue;
      if (o.gap == 0) {
        EXPECT_THROW(validate_alpha(num, den, 4, 6), WindowHitError) << num << "/" << den;
      } else {
        const AlphaParam a = validate_alpha(num, den, 4, 6);
        EXPECT_EQ(a.zeta_scaled, o.gap) << num << "/" << den;
      }
    }
  }
}

TEST(DefaultAlpha, Window) {
  const AlphaParam a = default_alpha(79, 100, 4, 0);
  EXPECT_EQ(a.v_max, 8U);
  EXPECT_EQ(a.e_max, 28U);
  const AlphaParam b = default_alpha(79, 100, 3, 2);
  EXPECT_EQ(b.v_max, 6U);
  EXPECT_EQ(b.e_max, 28U);
  EXPECT_EQ(a.min_rigid_degree(), 2U);
}

TEST(AlphaProperty, ExactSignOverWindow) {
  const AlphaParam a = validate_alpha(79, 100, 8, 28);
  for (std::int64_t v = 0; v <= 8; ++v)
    for (std::int64_t e = 0; e <= 28; ++e) {
      if (v == 0 && e == 0) continue;
      const double approx = static_cast<double>(v) - 0.79 * static_cast<double>(e);
      EXPECT_EQ(a.scaled(v, e) < 0, approx < 0);
      EXPECT_NE(a.scaled(v, e), 0);
      EXPECT_GE(std::llabs(a.scaled(v, e)), a.zeta_scaled);
    }
}

TEST(ExtType, Examples) {
  EXPECT_EQ(ext_type(pair(3, clique(3), {1}, {1, 2, 3})), (ExtType{2, 3}));
  EXPECT_EQ(ext_type(pair(2, {{1, 2}}, {1}, {1, 2}, {1})), (ExtType{1, 1}));
  EXPECT_EQ(ext_type(pair(3, clique(3), {1, 2}, {1, 2})), (ExtType{0, 0}));
  EXPECT_THROW(ext_type(pair(3, {}, {1, 2}, {1})), std::invalid_argument);
}

TEST(ExtType, QVerticesCountAsBase) {
  // Q = {3}; H1 = {1,2} with edges 12, 23, 13: 2 lies in H1 \ H0, edges 12 and 23 are new.
  EXPECT_EQ(ext_type(pair(3, clique(3), {1}, {1, 2}, {3})), (ExtType{1, 2}));
}

TEST(ClassifyPair, VertexToEdge) {
  const AlphaParam a = default_alpha(79, 100, 3);
  const Classification c = classify_pair(pair(2, {{1, 2}}, {1}, {1, 2}), a);
  EXPECT_TRUE(c.sparse);
  EXPECT_TRUE(c.safe);
  EXPECT_FALSE(c.rigid);
  EXPECT_FALSE(c.dense);
  EXPECT_EQ(c.value, Rational::make(21, 100));
}

TEST(ClassifyPair, Triangle) {
  const AlphaParam a = default_alpha(79, 100, 3);
  const Classification c = classify_pair(pair(3, clique(3), {1}, {1, 2, 3}), a);
  EXPECT_TRUE(c.dense);
  EXPECT_TRUE(c.rigid);
  EXPECT_TRUE(c.hinged);
  EXPECT_FALSE(c.safe);
}

TEST(ClassifyPair, K4NotHinged) {
  const AlphaParam a = default_alpha(79, 100, 3);
  const Classification c = classify_pair(pair(4, clique(4), {1}, {1, 2, 3, 4}), a);
  EXPECT_TRUE(c.dense);
  EXPECT_TRUE(c.rigid);
  EXPECT_FALSE(c.hinged);
}

TEST(ClassifyPair, TrivialPair) {
  const AlphaParam a = default_alpha(79, 100, 3);
  const Classification c = classify_pair(pair(3, clique(3), {1, 2}, {1, 2}), a);
  EXPECT_TRUE(c.safe);
  EXPECT_FALSE(c.rigid);
  EXPECT_FALSE(c.dense);
  EXPECT_FALSE(c.sparse);
}

TEST(ClassifyPair, WindowExceeded) {
  const AlphaParam a = validate_alpha(79, 100, 2, 3);
  EXPECT_THROW(classify_pair(pair(4, clique(4), {1}, {1, 2, 3, 4}), a), WindowExceededError);
}

TEST(ClassifyPair, AgreesWithNaiveOracle) {
  std::mt19937_64 rng(2024);
  for (auto [num, den] : {std::pair{79L, 100L}, std::pair{701L, 1000L}}) {
    for (int rep = 0; rep < 40; ++rep) {
      std::uniform_real_distribution<double> pd(0.2, 0.9);
      const VertexSet q = rep % 3 == 0 ? VertexSet{6} : VertexSet{};
      const Graph t = oracle::random_graph(6, pd(rng), rng, q);
      const AlphaParam a = default_alpha(num, den, 3, q.size());
      for (unsigned m1 = 0; m1 < 64; ++m1) {
        for (unsigned m0 = m1;; m0 = (m0 - 1) & m1) {
          std::vector<Vertex> h0, h1;
          for (Vertex v = 1; v <= 6; ++v) {
            if (m0 >> (v - 1) & 1U) h0.push_back(v);
            if (m1 >> (v - 1) & 1U) h1.push_back(v);
          }
          const PairSpec p{t, VertexSet(h0), VertexSet(h1)};
          const Classification c = classify_pair(p, a);
          const oracle::NaiveClass o = oracle::naive_classify(p, num, den);
          ASSERT_EQ(c.ext_type.v, o.v);
          ASSERT_EQ(c.ext_type.e, o.e);
          ASSERT_EQ(c.dense, o.dense);
          ASSERT_EQ(c.sparse, o.sparse);
          ASSERT_EQ(c.safe, o.safe);
          ASSERT_EQ(c.rigid, o.rigid);
          ASSERT_EQ(c.hinged, o.hinged);
          if (m0 == 0) break;
        }
      }
    }
  }
}

TEST(ClassifyProperty, RigidIsZetaDenseAndExclusiveWithSafe) {
  std::mt19937_64 rng(77);
  const AlphaParam a = default_alpha(79, 100, 3);
  for (int rep = 0; rep < 60; ++rep) {
    const Graph t = oracle::random_graph(6, 0.6, rng);
    for (unsigned m1 = 1; m1 < 64; ++m1) {
      for (unsigned m0 = (m1 - 1) & m1;; m0 = (m0 - 1) & m1) {
        std::vector<Vertex> h0, h1;
        for (Vertex v = 1; v <= 6; ++v) {
          if (m0 >> (v - 1) & 1U) h0.push_back(v);
          if (m1 >> (v - 1) & 1U) h1.push_back(v);
        }
        const Classification c = classify_pair(PairSpec{t, VertexSet(h0), VertexSet(h1)}, a);
        if (c.rigid) {
          EXPECT_TRUE(c.dense);
          EXPECT_LE(a.scaled(c.ext_type.v, c.ext_type.e), -a.zeta_scaled);
        }
        if (c.safe) EXPECT_TRUE(c.sparse);
        EXPECT_FALSE(c.safe && c.rigid);
        EXPECT_NE(c.dense, c.sparse);
        if (m0 == 0) break;
      }
    }
  }
}

TEST(ExtensionProfileTest, EdgesAndTypes) {
  // Base {1}; new vertices 2,3 forming a triangle with 1.
  const Graph g = build_graph(3, clique(3));
  const ExtensionProfile prof(g, {2, 3}, {1, 0, 0});
  EXPECT_EQ(prof.edges(0b01), 1U);
  EXPECT_EQ(prof.edges(0b11), 3U);
  EXPECT_EQ(prof.type_of(0b11), (ExtType{2, 3}));
  const AlphaParam a = default_alpha(79, 100, 3);
  EXPECT_TRUE(prof.is_rigid(a));
  EXPECT_FALSE(prof.is_safe(a));
}
