#include "rigidlab/canonical.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <stdexcept>

namespace rigidlab {

namespace {

// Colour refinement until the partition stops splitting. Ranks come from
// sorted signatures, so the result is invariant under relabeling.
std::vector<int> refine(const Graph& g, std::vector<int> color) {
  const std::size_t n = g.order();
  std::size_t classes = 0;
  for (;;) {
    std::vector<std::vector<int>> sig(n);
    for (std::size_t i = 0; i < n; ++i) {
      sig[i].push_back(color[i]);
      std::vector<int> around;
      for (Vertex w : g.neighbors(static_cast<Vertex>(i + 1))) around.push_back(color[w - 1]);
      std::sort(around.begin(), around.end());
      sig[i].insert(sig[i].end(), around.begin(), around.end());
    }
    std::map<std::vector<int>, int> rank;
    for (const auto& s : sig) rank.emplace(s, 0);
    int r = 0;
    for (auto& [s, value] : rank) value = r++;
    for (std::size_t i = 0; i < n; ++i) color[i] = rank[sig[i]];
    if (rank.size() == classes) break;
    classes = rank.size();
  }
  return color;
}

}  // namespace

std::string canonical_code(const Graph& g, const std::vector<int>& colors,
                           std::size_t max_perms) {
  const std::size_t n = g.order();
  if (colors.size() != n) throw std::invalid_argument("one colour per vertex required");
  std::string head = std::to_string(n) + ":";
  for (int c : [&] {
         std::vector<int> sorted = colors;
         std::sort(sorted.begin(), sorted.end());
         return sorted;
       }())
    head += std::to_string(c) + ",";
  head += ":";
  if (n == 0) return head;

  // Input colours are ranked first so the refinement preserves them.
  const std::vector<int> refined = refine(g, colors);
  std::vector<Vertex> order(n);
  std::iota(order.begin(), order.end(), Vertex{1});
  std::sort(order.begin(), order.end(), [&](Vertex a, Vertex b) {
    return std::pair(colors[a - 1], refined[a - 1]) < std::pair(colors[b - 1], refined[b - 1]);
  });

  std::vector<std::pair<std::size_t, std::size_t>> cells;
  std::size_t total = 1;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && colors[order[j] - 1] == colors[order[i] - 1] &&
           refined[order[j] - 1] == refined[order[i] - 1])
      ++j;
    cells.emplace_back(i, j);
    for (std::size_t k = 2; k <= j - i; ++k) {
      total *= k;
      if (total > max_perms) throw std::length_error("canonical form search too large");
    }
    i = j;
  }

  std::string best;
  std::string bits(n * (n - 1) / 2, '0');
  for (;;) {
    std::size_t pos = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) bits[pos++] = g.is_edge(order[i], order[j]) ? '1' : '0';
    if (best.empty() || bits < best) best = bits;
    // Odometer over in-cell permutations.
    std::size_t c = 0;
    for (; c < cells.size(); ++c) {
      auto first = order.begin() + static_cast<std::ptrdiff_t>(cells[c].first);
      auto last = order.begin() + static_cast<std::ptrdiff_t>(cells[c].second);
      if (std::next_permutation(first, last)) break;
    }
    if (c == cells.size()) break;
  }
  return head + best;
}

std::string canonical_code(const Graph& g) {
  std::vector<int> colors(g.order());
  for (std::size_t i = 0; i < g.order(); ++i) colors[i] = g.in_q(static_cast<Vertex>(i + 1)) ? 1 : 0;
  return canonical_code(g, colors);
}

}  // namespace rigidlab
