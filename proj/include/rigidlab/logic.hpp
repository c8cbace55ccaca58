#pragma once

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "rigidlab/graph.hpp"

namespace rigidlab {

enum class FormulaOp { eq, q_atom, r_atom, neg, conj, disj, exists, forall };

// Immutable AST node. Atoms use `var`/`var2`; quantifiers bind `var`;
// connectives use `children` (conj/disj are n-ary and flattened).
struct FormulaNode {
  FormulaOp op;
  std::string var;
  std::string var2;
  std::vector<std::shared_ptr<const FormulaNode>> children;
};

using NodePtr = std::shared_ptr<const FormulaNode>;

class ParseError : public std::invalid_argument {
 public:
  ParseError(const std::string& what, std::size_t token, std::size_t offset);
  std::size_t token;   // 1-based token index
  std::size_t offset;  // 0-based character offset
};

class EvaluationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class Formula {
 public:
  explicit Formula(NodePtr root);

  const FormulaNode& root() const { return *root_; }
  NodePtr root_ptr() const { return root_; }
  // Sorted, duplicate-free.
  const std::vector<std::string>& free_vars() const { return free_vars_; }
  std::size_t qdepth() const { return qdepth_; }
  bool is_sentence() const { return free_vars_.empty(); }
  // Canonical text; parse(to_string()) reproduces the AST.
  std::string to_string() const;

  friend bool operator==(const Formula& a, const Formula& b);

 private:
  NodePtr root_;
  std::vector<std::string> free_vars_;
  std::size_t qdepth_ = 0;
};

// Grammar:
//   formula := quant | bool
//   quant   := ("forall" | "exists") var "." formula
//   bool    := conj ("|" conj)*
//   conj    := term ("&" term)*
//   term    := "~" term | quant | "(" formula ")" | atom
//   atom    := var "=" var | "Q(" var ")" | "R(" var "," var ")"
// A quantifier extends as far right as possible.
Formula parse_formula(const std::string& text);

std::size_t quantifier_depth(const Formula& f);
std::vector<std::string> free_variables(const FormulaNode& node);
std::string to_string(const FormulaNode& node);

using Assignment = std::map<std::string, Vertex>;

// Tarskian evaluation: Q is membership in the graph's Q, R is adjacency.
bool evaluate(const Graph& g, const Formula& f, const Assignment& assignment = {});

// Evaluates f on the substructure induced by Q u params, with x1..xm bound
// to params[0..m-1].
bool evaluate_restricted(const Graph& g, const std::vector<Vertex>& params, const Formula& f);

// Upper bound n^qdepth on the number of atom evaluations.
double evaluation_work(const Formula& f, std::size_t n);

// Rewrites used by the evaluator: conjuncts (disjuncts) that do not mention
// the bound variable move out of exists (forall) blocks. Equivalent on every
// structure, including the empty one.
Formula miniscope(const Formula& f);

// Evaluator compiled once and reused over many graphs.
class CompiledFormula {
 public:
  explicit CompiledFormula(const Formula& f);
  ~CompiledFormula();
  CompiledFormula(CompiledFormula&&) noexcept;
  CompiledFormula& operator=(CompiledFormula&&) noexcept;

  const std::vector<std::string>& free_vars() const;
  bool operator()(const Graph& g, const Assignment& assignment = {}) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rigidlab
