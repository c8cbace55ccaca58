#include "rigidlab/logic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

namespace rigidlab {

ParseError::ParseError(const std::string& what, std::size_t token, std::size_t offset)
    : std::invalid_argument(what), token(token), offset(offset) {}

namespace {

NodePtr make_atom(FormulaOp op, std::string a, std::string b = {}) {
  return std::make_shared<const FormulaNode>(FormulaNode{op, std::move(a), std::move(b), {}});
}

NodePtr make_unary(FormulaOp op, std::string var, NodePtr child) {
  return std::make_shared<const FormulaNode>(FormulaNode{op, std::move(var), {}, {std::move(child)}});
}

// n-ary conj/disj with nested nodes of the same kind spliced in.
NodePtr make_nary(FormulaOp op, const std::vector<NodePtr>& parts) {
  std::vector<NodePtr> flat;
  for (const NodePtr& p : parts) {
    if (p->op == op) flat.insert(flat.end(), p->children.begin(), p->children.end());
    else flat.push_back(p);
  }
  if (flat.size() == 1) return flat.front();
  return std::make_shared<const FormulaNode>(FormulaNode{op, {}, {}, std::move(flat)});
}

enum class Tok { var, kw_exists, kw_forall, pred_q, pred_r, lparen, rparen, comma, dot, eq, neg, conj, disj, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t offset;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isalnum(static_cast<unsigned char>(s[i]))) ++i;
      const std::string word = s.substr(start, i - start);
      Tok kind = Tok::var;
      if (word == "exists") kind = Tok::kw_exists;
      else if (word == "forall") kind = Tok::kw_forall;
      else if (word == "Q") kind = Tok::pred_q;
      else if (word == "R") kind = Tok::pred_r;
      else if (std::isupper(static_cast<unsigned char>(word[0])))
        throw ParseError("unknown predicate symbol '" + word + "' at token " +
                             std::to_string(out.size() + 1),
                         out.size() + 1, start);
      else if (std::any_of(word.begin(), word.end(),
                           [](char ch) { return std::isupper(static_cast<unsigned char>(ch)); }))
        throw ParseError("bad variable name '" + word + "'", out.size() + 1, start);
      out.push_back({kind, word, start});
      continue;
    }
    Tok kind;
    switch (c) {
      case '(': kind = Tok::lparen; break;
      case ')': kind = Tok::rparen; break;
      case ',': kind = Tok::comma; break;
      case '.': kind = Tok::dot; break;
      case '=': kind = Tok::eq; break;
      case '~': kind = Tok::neg; break;
      case '&': kind = Tok::conj; break;
      case '|': kind = Tok::disj; break;
      default:
        throw ParseError(std::string("syntax error at token ") + std::to_string(out.size() + 1) +
                             ": unexpected character '" + c + "'",
                         out.size() + 1, start);
    }
    ++i;
    out.push_back({kind, std::string(1, c), start});
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  NodePtr parse() {
    NodePtr f = formula();
    if (peek().kind != Tok::end) fail("unexpected '" + peek().text + "'");
    return f;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  const Token& take() { return toks_[pos_++]; }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    const std::string near = t.kind == Tok::end ? "end of input" : "'" + t.text + "'";
    throw ParseError("syntax error at token " + std::to_string(pos_ + 1) + " (" + near +
                         "): " + what,
                     pos_ + 1, t.offset);
  }

  void expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail(std::string("expected ") + what);
    ++pos_;
  }

  std::string variable() {
    if (peek().kind != Tok::var) fail("expected variable");
    return take().text;
  }

  bool at_quant() const { return peek().kind == Tok::kw_exists || peek().kind == Tok::kw_forall; }

  NodePtr formula() { return at_quant() ? quant() : disjunction(); }

  NodePtr quant() {
    const FormulaOp op = take().kind == Tok::kw_exists ? FormulaOp::exists : FormulaOp::forall;
    std::string var = variable();
    expect(Tok::dot, "'.'");
    return make_unary(op, std::move(var), formula());
  }

  NodePtr disjunction() {
    std::vector<NodePtr> parts{conjunction()};
    while (peek().kind == Tok::disj) {
      ++pos_;
      parts.push_back(conjunction());
    }
    return make_nary(FormulaOp::disj, parts);
  }

  NodePtr conjunction() {
    std::vector<NodePtr> parts{term()};
    while (peek().kind == Tok::conj) {
      ++pos_;
      parts.push_back(term());
    }
    return make_nary(FormulaOp::conj, parts);
  }

  NodePtr term() {
    switch (peek().kind) {
      case Tok::neg:
        ++pos_;
        return make_unary(FormulaOp::neg, {}, term());
      case Tok::kw_exists:
      case Tok::kw_forall:
        return quant();
      case Tok::lparen: {
        ++pos_;
        NodePtr inner = formula();
        expect(Tok::rparen, "')'");
        return inner;
      }
      default:
        return atom();
    }
  }

  NodePtr atom() {
    switch (peek().kind) {
      case Tok::pred_q: {
        ++pos_;
        expect(Tok::lparen, "'('");
        std::string x = variable();
        expect(Tok::rparen, "')'");
        return make_atom(FormulaOp::q_atom, std::move(x));
      }
      case Tok::pred_r: {
        ++pos_;
        expect(Tok::lparen, "'('");
        std::string x = variable();
        expect(Tok::comma, "','");
        std::string y = variable();
        expect(Tok::rparen, "')'");
        return make_atom(FormulaOp::r_atom, std::move(x), std::move(y));
      }
      case Tok::var: {
        std::string x = take().text;
        expect(Tok::eq, "'='");
        std::string y = variable();
        return make_atom(FormulaOp::eq, std::move(x), std::move(y));
      }
      default:
        fail("expected atom");
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

void collect_free(const FormulaNode& n, std::multiset<std::string>& bound,
                  std::set<std::string>& out) {
  switch (n.op) {
    case FormulaOp::eq:
    case FormulaOp::r_atom:
      if (!bound.count(n.var)) out.insert(n.var);
      if (!bound.count(n.var2)) out.insert(n.var2);
      return;
    case FormulaOp::q_atom:
      if (!bound.count(n.var)) out.insert(n.var);
      return;
    case FormulaOp::exists:
    case FormulaOp::forall: {
      auto it = bound.insert(n.var);
      collect_free(*n.children[0], bound, out);
      bound.erase(it);
      return;
    }
    default:
      for (const NodePtr& c : n.children) collect_free(*c, bound, out);
  }
}

std::size_t depth_of(const FormulaNode& n) {
  std::size_t d = 0;
  for (const NodePtr& c : n.children) d = std::max(d, depth_of(*c));
  if (n.op == FormulaOp::exists || n.op == FormulaOp::forall) ++d;
  return d;
}

bool open_ended(const FormulaNode& n) {
  if (n.op == FormulaOp::exists || n.op == FormulaOp::forall) return true;
  if (n.op == FormulaOp::neg) return open_ended(*n.children[0]);
  return false;
}

bool same_tree(const FormulaNode& a, const FormulaNode& b) {
  if (a.op != b.op || a.var != b.var || a.var2 != b.var2 || a.children.size() != b.children.size())
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!same_tree(*a.children[i], *b.children[i])) return false;
  return true;
}

}  // namespace

std::vector<std::string> free_variables(const FormulaNode& node) {
  std::set<std::string> out;
  std::multiset<std::string> bound;
  collect_free(node, bound, out);
  return {out.begin(), out.end()};
}

std::string to_string(const FormulaNode& n) {
  switch (n.op) {
    case FormulaOp::eq: return n.var + " = " + n.var2;
    case FormulaOp::q_atom: return "Q(" + n.var + ")";
    case FormulaOp::r_atom: return "R(" + n.var + "," + n.var2 + ")";
    case FormulaOp::neg: {
      const FormulaNode& c = *n.children[0];
      const bool wrap = c.op == FormulaOp::conj || c.op == FormulaOp::disj;
      return "~" + (wrap ? "(" + to_string(c) + ")" : to_string(c));
    }
    case FormulaOp::conj:
    case FormulaOp::disj: {
      std::string out;
      const char* sep = n.op == FormulaOp::conj ? " & " : " | ";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        const FormulaNode& c = *n.children[i];
        const bool wrap = open_ended(c) || (n.op == FormulaOp::conj && c.op == FormulaOp::disj);
        if (i) out += sep;
        out += wrap ? "(" + to_string(c) + ")" : to_string(c);
      }
      return out;
    }
    case FormulaOp::exists: return "exists " + n.var + ". " + to_string(*n.children[0]);
    case FormulaOp::forall: return "forall " + n.var + ". " + to_string(*n.children[0]);
  }
  return {};
}

Formula::Formula(NodePtr root)
    : root_(std::move(root)), free_vars_(free_variables(*root_)), qdepth_(depth_of(*root_)) {}

std::string Formula::to_string() const { return rigidlab::to_string(*root_); }

bool operator==(const Formula& a, const Formula& b) { return same_tree(*a.root_, *b.root_); }

Formula parse_formula(const std::string& text) { return Formula(Parser(text).parse()); }

std::size_t quantifier_depth(const Formula& f) { return f.qdepth(); }

double evaluation_work(const Formula& f, std::size_t n) {
  return std::pow(static_cast<double>(n), static_cast<double>(f.qdepth()));
}

namespace {

bool mentions(const FormulaNode& n, const std::string& var) {
  const auto fv = free_variables(n);
  return std::binary_search(fv.begin(), fv.end(), var);
}

NodePtr miniscope_node(const NodePtr& n) {
  switch (n->op) {
    case FormulaOp::eq:
    case FormulaOp::q_atom:
    case FormulaOp::r_atom:
      return n;
    case FormulaOp::neg:
      return make_unary(FormulaOp::neg, {}, miniscope_node(n->children[0]));
    case FormulaOp::conj:
    case FormulaOp::disj: {
      std::vector<NodePtr> parts;
      for (const NodePtr& c : n->children) parts.push_back(miniscope_node(c));
      return make_nary(n->op, parts);
    }
    case FormulaOp::exists:
    case FormulaOp::forall: {
      const FormulaOp block = n->op == FormulaOp::exists ? FormulaOp::conj : FormulaOp::disj;
      NodePtr body = miniscope_node(n->children[0]);
      std::vector<NodePtr> parts =
          body->op == block ? body->children : std::vector<NodePtr>{body};
      std::vector<NodePtr> inside, outside;
      for (const NodePtr& p : parts) (mentions(*p, n->var) ? inside : outside).push_back(p);
      // With nothing left inside, the quantifier still decides the empty
      // domain case; keep it as is.
      if (outside.empty() || inside.empty()) return make_unary(n->op, n->var, body);
      outside.push_back(make_unary(n->op, n->var, make_nary(block, inside)));
      return make_nary(block, outside);
    }
  }
  return n;
}

}  // namespace

Formula miniscope(const Formula& f) { return Formula(miniscope_node(f.root_ptr())); }

namespace {

enum class Guard { none, neighbors, single, q };

struct CNode {
  FormulaOp op;
  int a = -1;
  int b = -1;
  Guard guard = Guard::none;
  int guard_slot = -1;
  std::vector<CNode> kids;
};

int cost_rank(const FormulaNode& n) {
  switch (n.op) {
    case FormulaOp::eq:
    case FormulaOp::q_atom:
    case FormulaOp::r_atom:
      return 0;
    case FormulaOp::neg:
      return cost_rank(*n.children[0]) == 0 ? 1 : 2;
    default:
      return 2;
  }
}

class Compiler {
 public:
  explicit Compiler(const std::vector<std::string>& free) {
    for (const std::string& v : free) scope_.emplace_back(v, next_slot_++);
  }

  int slots() const { return next_slot_; }

  CNode compile(const FormulaNode& n) {
    CNode c;
    c.op = n.op;
    switch (n.op) {
      case FormulaOp::eq:
      case FormulaOp::r_atom:
        c.a = lookup(n.var);
        c.b = lookup(n.var2);
        break;
      case FormulaOp::q_atom:
        c.a = lookup(n.var);
        break;
      case FormulaOp::neg:
        c.kids.push_back(compile(*n.children[0]));
        break;
      case FormulaOp::conj:
      case FormulaOp::disj: {
        std::vector<const FormulaNode*> order;
        for (const NodePtr& k : n.children) order.push_back(k.get());
        std::stable_sort(order.begin(), order.end(), [](const FormulaNode* x, const FormulaNode* y) {
          return cost_rank(*x) < cost_rank(*y);
        });
        for (const FormulaNode* k : order) c.kids.push_back(compile(*k));
        break;
      }
      case FormulaOp::exists:
      case FormulaOp::forall: {
        find_guard(n, c);
        const int slot = next_slot_++;
        c.a = slot;
        scope_.emplace_back(n.var, slot);
        c.kids.push_back(compile(*n.children[0]));
        scope_.pop_back();
        break;
      }
    }
    return c;
  }

 private:
  int lookup(const std::string& v) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == v) return it->second;
    throw EvaluationError("unassigned free variable '" + v + "'");
  }

  // A top-level conjunct R(u,v) / v=u / Q(v) under exists v (or the negated
  // disjunct under forall v) bounds the range of v.
  void find_guard(const FormulaNode& n, CNode& c) const {
    const bool ex = n.op == FormulaOp::exists;
    const FormulaNode& body = *n.children[0];
    const FormulaOp block = ex ? FormulaOp::conj : FormulaOp::disj;
    std::vector<const FormulaNode*> parts;
    if (body.op == block) {
      for (const NodePtr& k : body.children) parts.push_back(k.get());
    } else {
      parts.push_back(&body);
    }
    const std::string& v = n.var;
    int rank = 0;
    for (const FormulaNode* p : parts) {
      const FormulaNode* atom = p;
      if (!ex) {
        if (p->op != FormulaOp::neg) continue;
        atom = p->children[0].get();
      }
      auto other = [&]() -> const std::string* {
        if (atom->var == v && atom->var2 != v) return &atom->var2;
        if (atom->var2 == v && atom->var != v) return &atom->var;
        return nullptr;
      };
      if (atom->op == FormulaOp::eq && rank < 3) {
        if (const std::string* u = other()) {
          c.guard = Guard::single;
          c.guard_slot = lookup(*u);
          rank = 3;
        }
      } else if (atom->op == FormulaOp::r_atom && rank < 2) {
        if (const std::string* u = other()) {
          c.guard = Guard::neighbors;
          c.guard_slot = lookup(*u);
          rank = 2;
        }
      } else if (atom->op == FormulaOp::q_atom && atom->var == v && rank < 1) {
        c.guard = Guard::q;
        rank = 1;
      }
    }
  }

  std::vector<std::pair<std::string, int>> scope_;
  int next_slot_ = 0;
};

bool run(const Graph& g, const CNode& c, std::vector<Vertex>& env) {
  switch (c.op) {
    case FormulaOp::eq:
      return env[c.a] == env[c.b];
    case FormulaOp::q_atom:
      return g.in_q(env[c.a]);
    case FormulaOp::r_atom:
      return env[c.a] != env[c.b] && g.is_edge(env[c.a], env[c.b]);
    case FormulaOp::neg:
      return !run(g, c.kids[0], env);
    case FormulaOp::conj:
      for (const CNode& k : c.kids)
        if (!run(g, k, env)) return false;
      return true;
    case FormulaOp::disj:
      for (const CNode& k : c.kids)
        if (run(g, k, env)) return true;
      return false;
    case FormulaOp::exists:
    case FormulaOp::forall: {
      const bool want = c.op == FormulaOp::exists;
      auto body = [&](Vertex x) {
        env[c.a] = x;
        return run(g, c.kids[0], env) == want;
      };
      switch (c.guard) {
        case Guard::single:
          if (body(env[c.guard_slot])) return want;
          break;
        case Guard::neighbors:
          for (Vertex x : g.neighbors(env[c.guard_slot]))
            if (body(x)) return want;
          break;
        case Guard::q:
          for (Vertex x : g.q_set())
            if (body(x)) return want;
          break;
        case Guard::none:
          for (Vertex x = 1; x <= g.order(); ++x)
            if (body(x)) return want;
          break;
      }
      return !want;
    }
  }
  return false;
}

}  // namespace

struct CompiledFormula::Impl {
  std::vector<std::string> free;
  CNode root;
  int slots = 0;
};

CompiledFormula::CompiledFormula(const Formula& f) : impl_(std::make_unique<Impl>()) {
  const Formula m = miniscope(f);
  impl_->free = f.free_vars();
  Compiler comp(impl_->free);
  impl_->root = comp.compile(m.root());
  impl_->slots = comp.slots();
}

CompiledFormula::~CompiledFormula() = default;
CompiledFormula::CompiledFormula(CompiledFormula&&) noexcept = default;
CompiledFormula& CompiledFormula::operator=(CompiledFormula&&) noexcept = default;

const std::vector<std::string>& CompiledFormula::free_vars() const { return impl_->free; }

bool CompiledFormula::operator()(const Graph& g, const Assignment& assignment) const {
  std::vector<Vertex> env(static_cast<std::size_t>(impl_->slots), 0);
  for (std::size_t i = 0; i < impl_->free.size(); ++i) {
    auto it = assignment.find(impl_->free[i]);
    if (it == assignment.end())
      throw EvaluationError("unassigned free variable '" + impl_->free[i] + "'");
    if (!g.contains(it->second))
      throw EvaluationError("variable '" + impl_->free[i] + "' assigned outside [n]");
    env[i] = it->second;
  }
  return run(g, impl_->root, env);
}

bool evaluate(const Graph& g, const Formula& f, const Assignment& assignment) {
  return CompiledFormula(f)(g, assignment);
}

bool evaluate_restricted(const Graph& g, const std::vector<Vertex>& params, const Formula& f) {
  const VertexSet s = g.q_set().united(VertexSet(params));
  const InducedSubgraph sub = induced_subgraph(g, s);
  Assignment assignment;
  for (std::size_t i = 0; i < params.size(); ++i)
    assignment["x" + std::to_string(i + 1)] = sub.local(params[i]);
  return evaluate(sub.graph, f, assignment);
}

}  // namespace rigidlab
