#include "rigidlab/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rigidlab {

VertexSet::VertexSet(std::initializer_list<Vertex> members)
    : VertexSet(std::vector<Vertex>(members)) {}

VertexSet::VertexSet(std::vector<Vertex> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
  if (!members_.empty() && members_.front() == 0)
    throw GraphError("vertex 0 is not in [n]; vertices are 1-based");
}

bool VertexSet::contains(Vertex v) const {
  return std::binary_search(members_.begin(), members_.end(), v);
}

bool VertexSet::is_subset_of(const VertexSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(),
                       members_.begin(), members_.end());
}

VertexSet VertexSet::united(const VertexSet& other) const {
  VertexSet out;
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(out.members_));
  return out;
}

VertexSet VertexSet::minus(const VertexSet& other) const {
  VertexSet out;
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                      other.members_.end(), std::back_inserter(out.members_));
  return out;
}

VertexSet VertexSet::intersected(const VertexSet& other) const {
  VertexSet out;
  std::set_intersection(members_.begin(), members_.end(),
                        other.members_.begin(), other.members_.end(),
                        std::back_inserter(out.members_));
  return out;
}

std::string VertexSet::to_string() const {
  if (members_.empty()) return "-";
  std::string s;
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(members_[i]);
  }
  return s;
}

VertexSet VertexSet::parse(const std::string& text) {
  std::vector<Vertex> out;
  if (text.empty() || text == "-") return {};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) throw GraphError("empty item in vertex list '" + text + "'");
    std::size_t used = 0;
    unsigned long value = 0;
    try {
      value = std::stoul(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != item.size() || item[0] == '-' || item[0] == '+')
      throw GraphError("bad vertex id '" + item + "'");
    out.push_back(static_cast<Vertex>(value));
  }
  return VertexSet(std::move(out));
}

std::vector<Edge> Graph::q_edges() const {
  std::vector<Edge> out;
  for (const Edge& e : edges_)
    if (in_q(e.u) && in_q(e.v)) out.push_back(e);
  return out;
}

Graph Graph::with_q(const VertexSet& q) const {
  for (Vertex v : q)
    if (!contains(v)) throw GraphError("Q vertex " + std::to_string(v) + " outside [n]");
  Graph out = *this;
  out.q_ = q;
  std::fill(out.q_mask_.begin(), out.q_mask_.end(), 0);
  for (Vertex v : q) out.q_mask_[v - 1] = 1;
  return out;
}

Graph make_graph_unchecked(std::size_t n, std::vector<Edge> sorted_edges,
                           const VertexSet& q_set) {
  Graph g;
  g.n_ = n;
  g.words_ = (n + 63) / 64;
  g.adj_.assign(n * g.words_, 0);
  g.q_mask_.assign(n, 0);
  for (Vertex v : q_set) g.q_mask_[v - 1] = 1;
  g.q_ = q_set;

  std::vector<std::size_t> deg(n + 1, 0);
  for (const Edge& e : sorted_edges) {
    const std::size_t i = e.u - 1, j = e.v - 1;
    g.adj_[i * g.words_ + (j >> 6)] |= std::uint64_t{1} << (j & 63);
    g.adj_[j * g.words_ + (i >> 6)] |= std::uint64_t{1} << (i & 63);
    ++deg[e.u];
    ++deg[e.v];
  }
  g.offsets_.assign(n + 1, 0);
  for (std::size_t v = 1; v <= n; ++v) g.offsets_[v] = g.offsets_[v - 1] + deg[v];
  g.nbrs_.assign(g.offsets_[n], 0);
  std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  // Sorted edge order gives sorted neighbour lists: for a fixed v, the
  // smaller neighbours arrive (as e.u) before the larger ones (as e.v).
  for (const Edge& e : sorted_edges) {
    g.nbrs_[fill[e.u - 1]++] = e.v;
    g.nbrs_[fill[e.v - 1]++] = e.u;
  }
  g.edges_ = std::move(sorted_edges);
  return g;
}

Graph build_graph(std::size_t n, const std::vector<Edge>& edges,
                  const VertexSet& q_set) {
  if (n < 1) throw GraphError("graph must have at least one vertex");
  std::vector<Edge> norm;
  norm.reserve(edges.size());
  for (const Edge& e : edges) {
    if (e.u < 1 || e.u > n || e.v < 1 || e.v > n)
      throw GraphError("edge {" + std::to_string(e.u) + "," + std::to_string(e.v) +
                       "} has an endpoint outside [1," + std::to_string(n) + "]");
    if (e.u == e.v) throw GraphError("self-loop at vertex " + std::to_string(e.u));
    norm.push_back(e.u < e.v ? e : Edge{e.v, e.u});
  }
  for (Vertex v : q_set)
    if (v > n) throw GraphError("Q vertex " + std::to_string(v) + " outside [n]");
  std::sort(norm.begin(), norm.end());
  norm.erase(std::unique(norm.begin(), norm.end()), norm.end());
  return make_graph_unchecked(n, std::move(norm), q_set);
}

Vertex InducedSubgraph::local(Vertex original_vertex) const {
  auto it = std::lower_bound(relabel.begin(), relabel.end(), original_vertex);
  if (it == relabel.end() || *it != original_vertex) return 0;
  return static_cast<Vertex>(it - relabel.begin() + 1);
}

InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& s) {
  for (Vertex v : s)
    if (!g.contains(v))
      throw GraphError("vertex " + std::to_string(v) + " is not in the graph");
  InducedSubgraph out;
  out.relabel = s.members();
  if (s.empty()) {
    out.empty = true;
    return out;
  }
  std::vector<Edge> edges;
  std::vector<Vertex> q;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (g.in_q(s[i])) q.push_back(static_cast<Vertex>(i + 1));
    for (std::size_t j = i + 1; j < s.size(); ++j)
      if (g.is_edge(s[i], s[j]))
        edges.push_back({static_cast<Vertex>(i + 1), static_cast<Vertex>(j + 1)});
  }
  out.graph = make_graph_unchecked(s.size(), std::move(edges), VertexSet(std::move(q)));
  return out;
}

ExtensionEnumerator::ExtensionEnumerator(const Graph& g, const VertexSet& exclude,
                                         std::size_t k, VertexFilter allow)
    : k_(k) {
  for (Vertex v = 1; v <= g.order(); ++v)
    if (!exclude.contains(v) && (!allow || allow(v))) pool_.push_back(v);
}

bool ExtensionEnumerator::next(VertexSet& out) {
  const std::size_t m = pool_.size();
  // Advance the current combination; on exhaustion move to the next size.
  bool advanced = false;
  if (size_ > 0) {
    for (std::size_t i = size_; i-- > 0;) {
      if (idx_[i] < m - size_ + i) {
        ++idx_[i];
        for (std::size_t j = i + 1; j < size_; ++j) idx_[j] = idx_[j - 1] + 1;
        advanced = true;
        break;
      }
    }
  }
  if (!advanced) {
    ++size_;
    if (size_ > k_ || size_ > m) return false;
    idx_.resize(size_);
    for (std::size_t i = 0; i < size_; ++i) idx_[i] = i;
  }
  std::vector<Vertex> members(size_);
  for (std::size_t i = 0; i < size_; ++i) members[i] = pool_[idx_[i]];
  out = VertexSet(std::move(members));
  return true;
}

std::vector<VertexSet> enumerate_extensions(const Graph& g, const VertexSet& exclude,
                                            std::size_t k,
                                            ExtensionEnumerator::VertexFilter allow) {
  std::vector<VertexSet> out;
  ExtensionEnumerator it(g, exclude, k, std::move(allow));
  VertexSet s;
  while (it.next(s)) out.push_back(s);
  return out;
}

const VertexSet* GraphText::find(const std::string& key) const {
  for (const auto& [k, v] : extra_sets)
    if (k == key) return &v;
  return nullptr;
}

void write_graph(std::ostream& out, const Graph& g,
                 const std::vector<std::pair<std::string, VertexSet>>& extra) {
  out << "n " << g.order() << " q " << g.q_set().to_string();
  for (const auto& [key, set] : extra) out << ' ' << key << ' ' << set.to_string();
  out << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

std::string graph_to_string(const Graph& g) {
  std::ostringstream ss;
  write_graph(ss, g);
  return ss.str();
}

namespace {

bool is_header_key(const std::string& tok) {
  return tok == "n" || tok == "q" || tok == "h0" || tok == "h1";
}

}  // namespace

GraphText read_graph(std::istream& in) {
  std::string line;
  bool have_header = false;
  std::size_t n = 0;
  VertexSet q;
  GraphText out;
  std::vector<Edge> edges;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    for (std::string t; ls >> t;) toks.push_back(t);
    if (toks.empty()) continue;
    if (!have_header) {
      if (toks[0] != "n")
        throw GraphError("line " + std::to_string(line_no) + ": expected header 'n <n> q <Q>'");
      for (std::size_t i = 0; i < toks.size();) {
        const std::string key = toks[i++];
        std::string value;
        if (i < toks.size() && !is_header_key(toks[i])) value = toks[i++];
        if (key == "n") {
          try {
            n = std::stoul(value);
          } catch (const std::exception&) {
            throw GraphError("header: bad vertex count '" + value + "'");
          }
        } else if (key == "q") {
          q = VertexSet::parse(value);
        } else if (key == "h0" || key == "h1") {
          out.extra_sets.emplace_back(key, VertexSet::parse(value));
        } else {
          throw GraphError("header: unknown key '" + key + "'");
        }
      }
      have_header = true;
      continue;
    }
    if (toks.size() != 2)
      throw GraphError("line " + std::to_string(line_no) + ": expected 'u v'");
    try {
      edges.push_back({static_cast<Vertex>(std::stoul(toks[0])),
                       static_cast<Vertex>(std::stoul(toks[1]))});
    } catch (const std::exception&) {
      throw GraphError("line " + std::to_string(line_no) + ": bad vertex id");
    }
  }
  if (!have_header) throw GraphError("missing header line");
  out.graph = build_graph(n, edges, q);
  for (const auto& [key, set] : out.extra_sets)
    for (Vertex v : set)
      if (v > n) throw GraphError(key + " vertex " + std::to_string(v) + " outside [n]");
  return out;
}

GraphText read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file '" + path + "'");
  return read_graph(in);
}

}  // namespace rigidlab
