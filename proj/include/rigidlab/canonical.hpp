#pragma once

#include <string>
#include <vector>

#include "rigidlab/graph.hpp"

namespace rigidlab {

// Canonical code of a small vertex-coloured graph: colour-refined cells, then
// the lexicographically smallest upper-triangle adjacency string over all
// relabelings that permute vertices within cells. Two graphs get the same
// code iff they are isomorphic by a colour-preserving map.
// Throws std::length_error when the in-cell search exceeds `max_perms`.
std::string canonical_code(const Graph& g, const std::vector<int>& colors,
                           std::size_t max_perms = 5'000'000);

// Colours taken from Q membership.
std::string canonical_code(const Graph& g);

}  // namespace rigidlab
