#include "treeflow/graph.hpp"

#include <algorithm>
#include <deque>

#include "treeflow/error.hpp"

namespace treeflow {

MetricGraph::MetricGraph(int num_vertices, std::vector<Edge> edges, bool inexact) : inexact_(inexact) {
  if (num_vertices <= 0) throw Error(ErrorCode::GraphFormat, "graph needs at least one vertex");
  for (const auto& e : edges) {
    if (e.from < 0 || e.from >= num_vertices || e.to < 0 || e.to >= num_vertices) {
      throw Error(ErrorCode::GraphFormat, "edge endpoint out of range");
    }
    if (e.length <= 0) throw Error(ErrorCode::GraphFormat, "edge lengths must be positive");
  }

  std::vector<bool> alive(static_cast<std::size_t>(num_vertices), true);
  std::vector<bool> edge_alive(edges.size(), true);

  // Merge valence-2 vertices until none remain.
  for (;;) {
    std::vector<int> valence(static_cast<std::size_t>(num_vertices), 0);
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!edge_alive[i]) continue;
      ++valence[edges[i].from];
      ++valence[edges[i].to];
    }
    int merge_vertex = -1;
    for (int v = 0; v < num_vertices; ++v) {
      if (!alive[v]) continue;
      if (valence[v] < 2) {
        throw Error(ErrorCode::ModelConstraint,
                    "vertex " + std::to_string(v) + " has valence " + std::to_string(valence[v]) +
                        " (geodesic completeness needs >= 2, branching needs >= 3)");
      }
      if (valence[v] == 2 && merge_vertex < 0) merge_vertex = v;
    }
    if (merge_vertex < 0) break;

    std::vector<std::size_t> incident;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (!edge_alive[i]) continue;
      if (edges[i].from == merge_vertex) incident.push_back(i);
      if (edges[i].to == merge_vertex) incident.push_back(i);
    }
    if (incident.size() != 2 || incident[0] == incident[1]) {
      throw Error(ErrorCode::ModelConstraint, "graph is a circle; its universal cover has only two ends");
    }
    auto other_end = [&](std::size_t i) { return edges[i].from == merge_vertex ? edges[i].to : edges[i].from; };
    std::size_t keep = std::min(incident[0], incident[1]);
    std::size_t drop = std::max(incident[0], incident[1]);
    Edge merged{other_end(keep), other_end(drop), edges[keep].length + edges[drop].length};
    edges[keep] = merged;
    edge_alive[drop] = false;
    alive[merge_vertex] = false;
  }

  input_vertex_map_.assign(static_cast<std::size_t>(num_vertices), -1);
  for (int v = 0; v < num_vertices; ++v) {
    if (alive[v]) input_vertex_map_[v] = num_vertices_++;
  }
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!edge_alive[i]) continue;
    edges_.push_back({input_vertex_map_[edges[i].from], input_vertex_map_[edges[i].to], edges[i].length});
  }

  out_.assign(static_cast<std::size_t>(num_vertices_), {});
  for (int d = 0; d < num_directed_edges(); ++d) out_[tail(d)].push_back(d);
  lengths_d_.reserve(edges_.size());
  min_length_ = edges_.front().length;
  for (const auto& e : edges_) {
    lengths_d_.push_back(to_double(e.length));
    if (e.length < min_length_) min_length_ = e.length;
  }
  mpz_class den = 1;
  for (const auto& e : edges_) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), e.length.get_den_mpz_t());
  bool fits = true;
  std::vector<long long> nums;
  for (const auto& e : edges_) {
    mpz_class n = e.length.get_num() * (den / e.length.get_den());
    if (mpz_sizeinbase(n.get_mpz_t(), 2) > 40) {
      fits = false;
      break;
    }
    nums.push_back(n.get_si());
  }
  if (fits) {
    length_num_ = std::move(nums);
    length_den_ = Rational(den);
  }

  // BFS spanning tree from the base vertex.
  tree_path_.assign(static_cast<std::size_t>(num_vertices_), {});
  std::vector<bool> seen(static_cast<std::size_t>(num_vertices_), false);
  std::vector<bool> tree_edge(edges_.size(), false);
  std::deque<int> queue{0};
  seen[0] = true;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int d : out_[v]) {
      int w = head(d);
      if (seen[w]) continue;
      seen[w] = true;
      tree_edge[d >> 1] = true;
      tree_path_[w] = tree_path_[v];
      tree_path_[w].push_back(d);
      queue.push_back(w);
    }
  }
  for (int v = 0; v < num_vertices_; ++v) {
    if (!seen[v]) throw Error(ErrorCode::ModelConstraint, "graph is disconnected");
  }
  gen_of_edge_.assign(edges_.size(), -1);
  for (int e = 0; e < num_edges(); ++e) {
    if (tree_edge[e]) continue;
    gen_of_edge_[e] = static_cast<int>(generators_.size());
    generators_.push_back(e);
  }
  if (generators_.size() < 2) {
    throw Error(ErrorCode::ModelConstraint, "free group rank must be at least 2");
  }
}

EdgePath MetricGraph::loop_of(const Word& w) const {
  EdgePath path;
  for (int letter : w.letters()) {
    int e = generators_[letter_generator(letter)];
    int d = 2 * e + (letter_is_inverse(letter) ? 1 : 0);
    EdgePath piece = tree_path_[tail(d)];
    piece.push_back(d);
    EdgePath back = reverse_path(tree_path_[head(d)]);
    piece.insert(piece.end(), back.begin(), back.end());
    path = concat_reduce(path, piece);
  }
  return path;
}

Word MetricGraph::word_of(std::span<const int> path) const {
  std::vector<int> letters;
  for (int d : path) {
    int gen = gen_of_edge_[d >> 1];
    if (gen >= 0) letters.push_back(2 * gen + (d & 1));
  }
  return Word(std::move(letters));
}

std::string MetricGraph::edge_name(int d) const {
  int gen = gen_of_edge_[d >> 1];
  if (gen >= 0 && gen < 26) {
    char c = static_cast<char>('a' + gen);
    return std::string(1, (d & 1) ? static_cast<char>(c - 'a' + 'A') : c);
  }
  return std::string((d & 1) ? "(T" : "(t") + std::to_string(d >> 1) + ")";
}

MetricGraph MetricGraph::scaled(const Rational& factor) const {
  std::vector<Edge> e = edges_;
  for (auto& x : e) x.length *= factor;
  return MetricGraph(num_vertices_, std::move(e), inexact_);
}

EdgePath reduce_path(std::span<const int> path) {
  EdgePath out;
  out.reserve(path.size());
  for (int d : path) {
    if (!out.empty() && out.back() == reverse_edge(d)) {
      out.pop_back();
    } else {
      out.push_back(d);
    }
  }
  return out;
}

EdgePath concat_reduce(std::span<const int> a, std::span<const int> b) {
  EdgePath out = reduce_path(a);
  for (int d : b) {
    if (!out.empty() && out.back() == reverse_edge(d)) {
      out.pop_back();
    } else {
      out.push_back(d);
    }
  }
  return out;
}

EdgePath reverse_path(std::span<const int> path) {
  EdgePath out;
  out.reserve(path.size());
  for (auto it = path.rbegin(); it != path.rend(); ++it) out.push_back(reverse_edge(*it));
  return out;
}

bool is_reduced(std::span<const int> path) {
  for (std::size_t i = 1; i < path.size(); ++i) {
    if (path[i] == reverse_edge(path[i - 1])) return false;
  }
  return true;
}

Rational path_length(const MetricGraph& g, std::span<const int> path) {
  // 40-bit numerators: no overflow below 2^23 edges
  if (g.has_integer_lengths() && path.size() < (std::size_t{1} << 23)) {
    long long n = 0;
    for (int d : path) n += g.length_num(d);
    Rational sum(mpz_class(static_cast<long>(n)), g.length_den().get_num());
    sum.canonicalize();
    return sum;
  }
  Rational sum = 0;
  for (int d : path) sum += g.length(d);
  return sum;
}

std::string path_str(const MetricGraph& g, std::span<const int> path) {
  if (path.empty()) return "1";
  std::string s;
  for (int d : path) s += g.edge_name(d);
  return s;
}

MetricGraph make_rose(const std::vector<Rational>& lengths, bool inexact) {
  std::vector<Edge> edges;
  for (const auto& l : lengths) edges.push_back({0, 0, l});
  return MetricGraph(1, std::move(edges), inexact);
}

}  // namespace treeflow
