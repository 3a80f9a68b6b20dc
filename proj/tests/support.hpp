#pragma once

#include <array>
#include <cmath>
#include <numeric>
#include <cstdio>
#include <map>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "treeflow/graph.hpp"
#include "treeflow/tree.hpp"

namespace oracle {

using treeflow::EdgePath;
using treeflow::MetricGraph;
using treeflow::Rational;

// Explicit finite piece of the universal cover: every reduced path of at
// most `depth` edges from the root, joined to its one-edge extensions.
// Distances come from Dijkstra, so nothing here reuses the library's
// prefix arithmetic.
class Unfolding {
 public:
  Unfolding(const MetricGraph& g, int depth) {
    std::vector<EdgePath> frontier{{}};
    index_[{}] = 0;
    nodes_.push_back({});
    adj_.emplace_back();
    for (int k = 0; k < depth; ++k) {
      std::vector<EdgePath> next;
      for (const auto& p : frontier) {
        int v = p.empty() ? g.base_vertex() : g.head(p.back());
        for (int f : g.out_edges(v)) {
          if (!p.empty() && f == treeflow::reverse_edge(p.back())) continue;
          EdgePath q = p;
          q.push_back(f);
          int a = index_[p];
          int b = static_cast<int>(nodes_.size());
          index_[q] = b;
          nodes_.push_back(q);
          adj_.emplace_back();
          adj_[a].push_back({b, g.length(f)});
          adj_[b].push_back({a, g.length(f)});
          next.push_back(std::move(q));
        }
      }
      frontier = std::move(next);
    }
  }

  bool contains(const EdgePath& p) const { return index_.contains(p); }

  int index(const EdgePath& p) const { return index_.at(p); }

  // Dijkstra from one node to every node of the unfolding.
  std::vector<Rational> distances_from(const EdgePath& from) const {
    std::vector<Rational> dist(nodes_.size(), Rational(-1));
    using Item = std::pair<Rational, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    int src = index_.at(from);
    dist[src] = 0;
    pq.push({Rational(0), src});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d != dist[u]) continue;
      for (const auto& [v, w] : adj_[u]) {
        Rational nd = d + w;
        if (dist[v] < 0 || nd < dist[v]) {
          dist[v] = nd;
          pq.push({nd, v});
        }
      }
    }
    return dist;
  }

  Rational distance(const EdgePath& from, const EdgePath& to) const { return distances_from(from)[index_.at(to)]; }

  const std::vector<EdgePath>& nodes() const { return nodes_; }

 private:
  std::map<EdgePath, int> index_;
  std::vector<EdgePath> nodes_;
  std::vector<std::vector<std::pair<int, Rational>>> adj_;
};

inline EdgePath ray_head(const treeflow::End& xi, std::size_t n) {
  EdgePath p;
  for (std::size_t i = 0; i < n; ++i) p.push_back(xi.edge_at(i));
  return p;
}

// inf over vertices x of (b_xi + b_eta)(x, p), Busemann values read off far
// points of the two rays. Only vertices up to `search` edges deep are tried,
// and `u` must be deep enough that all rays involved merge before its rim.
inline Rational brute_beta(const Unfolding& u, int far, int search, const EdgePath& p, const treeflow::End& xi,
                           const treeflow::End& eta) {
  auto fx = u.distances_from(ray_head(xi, far));
  auto fe = u.distances_from(ray_head(eta, far));
  int ip = u.index(p);
  Rational best = 0;
  bool first = true;
  for (const EdgePath& x : u.nodes()) {
    if (static_cast<int>(x.size()) > search) continue;
    int ix = u.index(x);
    Rational v = fx[ix] - fx[ip] + fe[ix] - fe[ip];
    if (first || v < best) best = v;
    first = false;
  }
  return best;
}

// For a rose the non-backtracking series factors: with x_i = exp(-s l_i),
// the critical s solves sum_i 2 x_i / (1 + x_i) = 1.
inline double rose_delta(const std::vector<double>& lengths) {
  auto f = [&](double s) {
    double acc = 0;
    for (double l : lengths) {
      double x = std::exp(-s * l);
      acc += 2 * x / (1 + x);
    }
    return acc - 1;
  };
  double lo = 1e-9, hi = 100;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    (f(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Boundary mass beyond each directed edge of a rose at exponent delta, by
// plain power iteration on h(e) = sum_{f != rev e} exp(-delta l_f) h(f),
// normalized so the four (or 2k) first-edge masses exp(-delta l_e) h(e)
// sum to 1.
inline std::vector<double> rose_edge_mass(const MetricGraph& g, double delta) {
  int n = g.num_directed_edges();
  std::vector<double> h(n, 1.0), next(n);
  for (int it = 0; it < 20000; ++it) {
    for (int e = 0; e < n; ++e) {
      next[e] = 0;
      for (int f = 0; f < n; ++f)
        if (f != treeflow::reverse_edge(e)) next[e] += std::exp(-delta * g.length_d(f)) * h[f];
    }
    // lazy step keeps bipartite cases from oscillating
    for (int e = 0; e < n; ++e) h[e] = 0.5 * (h[e] + next[e]);
    double norm = std::accumulate(h.begin(), h.end(), 0.0);
    for (double& v : h) v /= norm;
  }
  double z = 0;
  for (int e = 0; e < n; ++e) z += std::exp(-delta * g.length_d(e)) * h[e];
  for (double& v : h) v /= z;
  return h;
}

struct Run {
  int code = -1;
  std::string out;
};

// Runs the CLI binary, capturing stdout.
inline Run run_cli(const std::string& args) {
  std::string cmd = std::string(TREEFLOW_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

inline std::string data(const std::string& name) { return std::string(TREEFLOW_DATA_DIR) + "/graphs/" + name; }

}  // namespace oracle
