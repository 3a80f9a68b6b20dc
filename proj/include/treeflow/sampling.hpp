#pragma once

#include <cstdint>
#include <random>

#include "treeflow/graph.hpp"
#include "treeflow/tree.hpp"
#include "treeflow/word.hpp"

// Deterministic random objects for property checks. Everything draws from a
// caller-owned mt19937_64 with plain modular reduction, so a seed gives the
// same objects on every standard library.
namespace treeflow::sample {

using Engine = std::mt19937_64;

// Uniform in [0, n).
std::uint64_t below(Engine& rng, std::uint64_t n);
// Reduced word of length uniform in [min_len, max_len].
Word word(Engine& rng, int rank, int min_len, int max_len);
// Random vertex of the tree: a lift of a random quotient vertex, the deck
// part drawn as a word of length <= max_len.
TreePoint vertex(const MetricGraph& g, Engine& rng, int max_len);
// Vertex, or (half the time) a point at a rational fraction of an edge.
TreePoint point(const MetricGraph& g, Engine& rng, int max_len);
// prefix . period^infinity with |prefix| <= max_len, 1 <= |period| <= 3.
End end(const MetricGraph& g, Engine& rng, int max_len);

}  // namespace treeflow::sample
