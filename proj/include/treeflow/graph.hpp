#pragma once

#include <span>
#include <string>
#include <vector>

#include "treeflow/rational.hpp"
#include "treeflow/word.hpp"

namespace treeflow {

struct Edge {
  int from = 0;
  int to = 0;
  Rational length;
};

// Directed edges are numbered 2*edge + orientation; orientation 0 runs
// from -> to. reverse(d) == d ^ 1 is a fixpoint-free involution.
using EdgePath = std::vector<int>;

inline int reverse_edge(int d) { return d ^ 1; }

// Finite connected metric graph: the quotient X/Gamma of a metric tree X by
// its free deck group Gamma.
//
// Construction normalizes the input: valence-2 vertices are merged into a
// single edge, valence-1 (and isolated) vertices are rejected. The base
// vertex is the first surviving vertex of the input. A BFS spanning tree
// from the base fixes the free generators: the non-tree edges, in input
// order, are 'a', 'b', 'c', ...
//
// Note on boundaries: distinct ends of the tree are at infinite Tits
// distance from each other, so every pair of distinct ends spans a rank one
// geodesic. Nothing in this library computes Tits angles.
class MetricGraph {
 public:
  MetricGraph(int num_vertices, std::vector<Edge> edges, bool inexact = false);

  int num_vertices() const { return num_vertices_; }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  int num_directed_edges() const { return 2 * num_edges(); }
  const std::vector<Edge>& edges() const { return edges_; }

  int tail(int d) const { return (d & 1) ? edges_[d >> 1].to : edges_[d >> 1].from; }
  int head(int d) const { return (d & 1) ? edges_[d >> 1].from : edges_[d >> 1].to; }
  const Rational& length(int d) const { return edges_[d >> 1].length; }
  double length_d(int d) const { return lengths_d_[d >> 1]; }

  // Directed edges leaving v.
  std::span<const int> out_edges(int v) const { return out_[v]; }
  int valence(int v) const { return static_cast<int>(out_[v].size()); }

  int base_vertex() const { return 0; }
  int rank() const { return static_cast<int>(generators_.size()); }
  bool inexact() const { return inexact_; }
  const Rational& min_length() const { return min_length_; }

  // Generator index of an edge, or -1 for spanning-tree edges.
  int generator_of_edge(int edge) const { return gen_of_edge_[edge]; }
  int edge_of_generator(int gen) const { return generators_[gen]; }

  // Directed edges from the base vertex to v along the spanning tree.
  const EdgePath& tree_path(int v) const { return tree_path_[v]; }

  // Reduced closed path at the base vertex representing the deck element.
  EdgePath loop_of(const Word& w) const;
  // Deck element represented by a closed path at the base vertex.
  Word word_of(std::span<const int> path) const;

  std::string edge_name(int d) const;
  // Index map from input vertex ids to normalized ids (-1 for merged).
  const std::vector<int>& input_vertex_map() const { return input_vertex_map_; }

  MetricGraph scaled(const Rational& factor) const;

  // Lengths as integers over one common denominator, when they fit in 40
  // bits; lets path sums run in machine integers.
  bool has_integer_lengths() const { return !length_num_.empty(); }
  long long length_num(int d) const { return length_num_[d >> 1]; }
  const Rational& length_den() const { return length_den_; }

 private:
  int num_vertices_ = 0;
  std::vector<Edge> edges_;
  std::vector<double> lengths_d_;
  std::vector<long long> length_num_;
  Rational length_den_ = 1;
  std::vector<std::vector<int>> out_;
  std::vector<int> generators_;
  std::vector<int> gen_of_edge_;
  std::vector<EdgePath> tree_path_;
  std::vector<int> input_vertex_map_;
  Rational min_length_;
  bool inexact_ = false;
};

// Free (backtrack-cancelling) reduction of an edge path.
EdgePath reduce_path(std::span<const int> path);
EdgePath concat_reduce(std::span<const int> a, std::span<const int> b);
EdgePath reverse_path(std::span<const int> path);
bool is_reduced(std::span<const int> path);
Rational path_length(const MetricGraph& g, std::span<const int> path);
std::string path_str(const MetricGraph& g, std::span<const int> path);

// Rose with one vertex and one loop per length: the standard fixtures.
MetricGraph make_rose(const std::vector<Rational>& lengths, bool inexact = false);

}  // namespace treeflow
