#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "rigidlab/logic.hpp"

using namespace rigidlab;

namespace {

// Random formula text over bound variables x,y,z and free variables u,w.
std::string random_formula(std::mt19937_64& rng, int depth, std::vector<std::string> vars) {
  auto pick = [&](const std::vector<std::string>& vs) { return vs[rng() % vs.size()]; };
  const int choice = static_cast<int>(rng() % 10);
  if (choice < 3 || (depth == 0 && choice < 7)) {
    switch (rng() % 3) {
      case 0: return pick(vars) + " = " + pick(vars);
      case 1: return "Q(" + pick(vars) + ")";
      default: return "R(" + pick(vars) + "," + pick(vars) + ")";
    }
  }
  if (depth > 0 && choice >= 7) {
    const std::string v = pick({"x", "y", "z"});
    std::vector<std::string> inner = vars;
    inner.push_back(v);
    return std::string(rng() % 2 ? "(exists " : "(forall ") + v + ". " +
           random_formula(rng, depth - 1, inner) + ")";
  }
  switch (rng() % 3) {
    case 0: return "~(" + random_formula(rng, depth, vars) + ")";
    case 1:
      return "(" + random_formula(rng, depth, vars) + " & " + random_formula(rng, depth, vars) + ")";
    default:
      return "(" + random_formula(rng, depth, vars) + " | " + random_formula(rng, depth, vars) + ")";
  }
}

bool ref(const Graph& g, const Formula& f, Assignment a = {}) {
  return oracle::reference_eval(g, f.root(), a);
}

}  // namespace

TEST(Parse, Examples) {
  const Formula a = parse_formula("forall x. exists y. R(x,y)");
  EXPECT_TRUE(a.is_sentence());
  EXPECT_EQ(a.qdepth(), 2U);
  const Formula b = parse_formula("exists x. R(x,y)");
  EXPECT_EQ(b.free_vars(), std::vector<std::string>{"y"});
  EXPECT_EQ(b.qdepth(), 1U);
}

TEST(Parse, SyntaxErrorPosition) {
  try {
    parse_formula("exists R");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.token, 2U);
    EXPECT_NE(std::string(e.what()).find("token 2"), std::string::npos);
  }
  EXPECT_THROW(parse_formula("R(x,y"), ParseError);
  EXPECT_THROW(parse_formula("x = "), ParseError);
  EXPECT_THROW(parse_formula(""), ParseError);
  EXPECT_THROW(parse_formula("R(x,y) R(y,x)"), ParseError);
}

TEST(Parse, UnknownPredicate) {
  try {
    parse_formula("exists x. P(x)");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("unknown predicate"), std::string::npos);
  }
}

TEST(Parse, Precedence) {
  EXPECT_EQ(parse_formula("Q(x) | Q(y) & R(x,y)").to_string(), "Q(x) | Q(y) & R(x,y)");
  EXPECT_EQ(parse_formula("(Q(x) | Q(y)) & R(x,y)").to_string(), "(Q(x) | Q(y)) & R(x,y)");
  EXPECT_EQ(parse_formula("~Q(x) & Q(y)").root().op, FormulaOp::conj);
  // Quantifier scope extends to the right.
  EXPECT_EQ(parse_formula("exists x. Q(x) & R(x,y)").root().op, FormulaOp::exists);
  EXPECT_EQ(parse_formula("Q(y) & exists x. R(x,y) | Q(x)").root().op, FormulaOp::conj);
}

TEST(QuantifierDepth, Examples) {
  EXPECT_EQ(quantifier_depth(parse_formula("R(x,y)")), 0U);
  EXPECT_EQ(quantifier_depth(parse_formula("exists x. (Q(x) & forall y. R(x,y))")), 2U);
  EXPECT_EQ(quantifier_depth(parse_formula("~exists x. x=x")), 1U);
  EXPECT_EQ(quantifier_depth(parse_formula("(exists x. Q(x)) & (exists y. exists z. R(y,z))")),
            2U);
}

TEST(Parse, RoundTripCanonical) {
  std::mt19937_64 rng(10);
  for (int rep = 0; rep < 500; ++rep) {
    const std::string text = random_formula(rng, 3, {"u", "w"});
    const Formula f = parse_formula(text);
    const std::string canon = f.to_string();
    const Formula g = parse_formula(canon);
    EXPECT_EQ(g, f) << text << " -> " << canon;
    EXPECT_EQ(g.to_string(), canon);
  }
}

TEST(Evaluate, Examples) {
  const Graph tri = build_graph(3, {{1, 2}, {2, 3}, {1, 3}});
  EXPECT_TRUE(evaluate(tri, parse_formula("exists x. exists y. exists z. (R(x,y)&R(y,z)&R(x,z))")));
  EXPECT_FALSE(evaluate(tri, parse_formula("exists x. R(x,x)")));
  const Graph two = build_graph(2, {}, VertexSet{1});
  EXPECT_FALSE(evaluate(two, parse_formula("forall x. Q(x)")));
  EXPECT_TRUE(evaluate(two, parse_formula("exists x. Q(x)")));
}

TEST(Evaluate, FreeVariables) {
  const Graph g = build_graph(3, {{1, 2}});
  const Formula f = parse_formula("exists x. R(x,y)");
  EXPECT_TRUE(evaluate(g, f, {{"y", 2}}));
  EXPECT_FALSE(evaluate(g, f, {{"y", 3}}));
  EXPECT_THROW(evaluate(g, f), EvaluationError);
  EXPECT_THROW(evaluate(g, f, {{"y", 4}}), EvaluationError);
}

TEST(Evaluate, AgreesWithReference) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 300; ++rep) {
    const std::size_t n = 1 + rng() % 7;
    std::vector<Vertex> qs;
    for (Vertex v = 1; v <= n; ++v)
      if (rng() % 3 == 0) qs.push_back(v);
    const Graph g = oracle::random_graph(n, 0.45, rng, VertexSet(qs));
    const Formula f = parse_formula(random_formula(rng, 3, {"u", "w"}));
    const CompiledFormula compiled(f);
    for (Vertex u = 1; u <= n; ++u)
      for (Vertex w = 1; w <= n; ++w) {
        Assignment a{{"u", u}, {"w", w}};
        const bool expect = ref(g, f, a);
        ASSERT_EQ(evaluate(g, f, a), expect) << f.to_string();
        ASSERT_EQ(compiled(g, a), expect) << f.to_string();
      }
  }
}

TEST(Evaluate, QuantifierDuality) {
  std::mt19937_64 rng(22);
  for (int rep = 0; rep < 200; ++rep) {
    const std::string phi = random_formula(rng, 2, {"u", "x"});
    const Graph g = oracle::random_graph(6, 0.4, rng, VertexSet{2, 3});
    const Formula lhs = parse_formula("~(forall x. " + phi + ")");
    const Formula rhs = parse_formula("exists x. ~(" + phi + ")");
    for (Vertex u = 1; u <= 6; ++u) {
      const Assignment a{{"u", u}};
      ASSERT_EQ(evaluate(g, lhs, a), evaluate(g, rhs, a)) << phi;
    }
  }
}

TEST(Miniscope, PreservesTruth) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 200; ++rep) {
    const Formula f = parse_formula(random_formula(rng, 3, {"u"}));
    const Formula m = miniscope(f);
    EXPECT_EQ(m.free_vars(), f.free_vars());
    const Graph g = oracle::random_graph(5, 0.5, rng, VertexSet{1});
    for (Vertex u = 1; u <= 5; ++u) {
      const Assignment a{{"u", u}};
      ASSERT_EQ(ref(g, m, a), ref(g, f, a)) << f.to_string() << " vs " << m.to_string();
    }
  }
}

TEST(Evaluate, K4SentenceOnLargeSparseGraph) {
  const Formula k4 = parse_formula(
      "exists a. exists b. exists c. exists d. (R(a,b) & R(a,c) & R(a,d) & R(b,c) & R(b,d) & "
      "R(c,d))");
  std::vector<Edge> edges;
  for (Vertex v = 1; v < 300; ++v) edges.push_back({v, v + 1});
  EXPECT_FALSE(evaluate(build_graph(300, edges), k4));
  edges.push_back({100, 102});
  edges.push_back({100, 103});
  edges.push_back({101, 103});
  EXPECT_TRUE(evaluate(build_graph(300, edges), k4));
  EXPECT_DOUBLE_EQ(evaluation_work(k4, 10), 1e4);
}

TEST(EvaluateRestricted, WholeGraphMatchesEvaluate) {
  std::mt19937_64 rng(24);
  for (int rep = 0; rep < 50; ++rep) {
    const Graph g = oracle::random_graph(5, 0.5, rng, VertexSet{1, 2, 3});
    const Formula f = parse_formula(random_formula(rng, 2, {"x1", "x2"}));
    for (Vertex a1 = 4; a1 <= 5; ++a1) {
      const Vertex a2 = a1 == 4 ? 5 : 4;
      EXPECT_EQ(evaluate_restricted(g, {a1, a2}, f), evaluate(g, f, {{"x1", a1}, {"x2", a2}}));
    }
  }
}

TEST(EvaluateRestricted, Examples) {
  const Graph g = build_graph(4, {{1, 2}});
  EXPECT_FALSE(evaluate_restricted(g, {1}, parse_formula("Q(x1)")));
  // 3's only neighbour is 4, outside Q u {3}.
  const Graph h = build_graph(4, {{3, 4}, {1, 2}}, VertexSet{1, 2});
  const Formula f = parse_formula("exists y. R(x1,y)");
  EXPECT_FALSE(evaluate_restricted(h, {3}, f));
  EXPECT_TRUE(evaluate(h, f, {{"x1", 3}}));
}

TEST(EvaluateRestricted, DependsOnlyOnInducedPart) {
  std::mt19937_64 rng(25);
  for (int rep = 0; rep < 100; ++rep) {
    const Graph g = oracle::random_graph(8, 0.4, rng, VertexSet{1, 2});
    const std::vector<Vertex> params{3, 5};
    const VertexSet inside{1, 2, 3, 5};
    std::vector<Edge> edges;
    for (const Edge& e : g.edges())
      if (inside.contains(e.u) && inside.contains(e.v)) edges.push_back(e);
    for (Vertex u = 1; u <= 8; ++u)
      for (Vertex v = u + 1; v <= 8; ++v)
        if (!(inside.contains(u) && inside.contains(v)) && rng() % 2) edges.push_back({u, v});
    const Graph other = build_graph(8, edges, VertexSet{1, 2});
    const Formula f = parse_formula(random_formula(rng, 2, {"x1", "x2"}));
    EXPECT_EQ(evaluate_restricted(g, params, f), evaluate_restricted(other, params, f));
  }
}
