#include "treeflow/patterson.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "treeflow/error.hpp"
#include "treeflow/kernels.hpp"

namespace treeflow {

std::vector<double> transition_matrix(const MetricGraph& g, double s) {
  std::size_t n = static_cast<std::size_t>(g.num_directed_edges());
  std::vector<double> m(n * n, 0.0);
  for (int e = 0; e < g.num_directed_edges(); ++e) {
    for (int f : g.out_edges(g.head(e))) {
      if (f == reverse_edge(e)) continue;
      m[static_cast<std::size_t>(e) * n + static_cast<std::size_t>(f)] = std::exp(-s * g.length_d(f));
    }
  }
  return m;
}

namespace {

constexpr double kPowerTol = 1e-14;
constexpr int kPowerMaxIter = 200000;

// Dominant eigenvector of (a + I)/2 for a nonnegative irreducible a.
std::vector<double> power_vector(const std::vector<double>& a, std::size_t n, int* iterations) {
  const auto& k = kernels::active();
  std::vector<double> x(n, 1.0);
  std::vector<double> y(n);
  int it = 0;
  for (; it < kPowerMaxIter; ++it) {
    k.matvec(a.data(), n, n, x.data(), y.data());
    k.axpy(1.0, x.data(), y.data(), n);
    double norm = k.sum(y.data(), n);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] /= norm;
      change = std::max(change, std::abs(y[i] - x[i]) / y[i]);
    }
    std::swap(x, y);
    if (change <= kPowerTol) break;
  }
  if (iterations != nullptr) *iterations = it;
  return x;
}

std::vector<double> transpose(const std::vector<double>& a, std::size_t n) {
  std::vector<double> t(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) t[j * n + i] = a[i * n + j];
  }
  return t;
}

}  // namespace

PerronData perron(const std::vector<double>& m, std::size_t n, bool want_left) {
  const auto& k = kernels::active();
  PerronData out;
  out.right = power_vector(m, n, &out.iterations);
  std::vector<double> mh(n);
  k.matvec(m.data(), n, n, out.right.data(), mh.data());
  out.rho = k.sum(mh.data(), n) / k.sum(out.right.data(), n);
  if (want_left) {
    int it = 0;
    out.left = power_vector(transpose(m, n), n, &it);
    out.iterations = std::max(out.iterations, it);
  }
  return out;
}

double spectral_radius(const MetricGraph& g, double s) {
  std::size_t n = static_cast<std::size_t>(g.num_directed_edges());
  return perron(transition_matrix(g, s), n, false).rho;
}

double GibbsWeights::weight(int d) const { return std::exp(-delta * graph.length_d(d)); }

std::vector<double> GibbsWeights::closed_form_left() const {
  std::vector<double> u(size());
  for (int d = 0; d < static_cast<int>(size()); ++d) u[d] = weight(d) * right[reverse_edge(d)];
  double scale = kernels::active().dot(u.data(), right.data(), size());
  for (double& x : u) x /= scale;
  return u;
}

GibbsWeights critical_exponent(const MetricGraph& g) {
  std::size_t n = static_cast<std::size_t>(g.num_directed_edges());
  double lo = 1e-6;
  double hi = 64.0 / to_double(g.min_length());
  if (!(spectral_radius(g, lo) > 1.0) || !(spectral_radius(g, hi) < 1.0)) {
    throw Error(ErrorCode::ModelConstraint, "spectral radius bracket does not straddle 1");
  }
  GibbsWeights w{g, 0.0, 0.0, 0, 0, {}, {}, {}};
  while (hi - lo > 1e-12 * std::max(1.0, lo)) {
    double mid = 0.5 * (lo + hi);
    (spectral_radius(g, mid) > 1.0 ? lo : hi) = mid;
    ++w.bisection_steps;
  }
  double s = 0.5 * (lo + hi);

  const auto& k = kernels::active();
  PerronData pd = perron(transition_matrix(g, s), n, true);
  for (int step = 0; step < 4 && std::abs(pd.rho - 1.0) > 0.0; ++step) {
    // d rho / ds = -(u^T (L o M) h) / (u^T h), L[e][f] = len(f).
    std::vector<double> m = transition_matrix(g, s);
    std::vector<double> lh(n);
    for (std::size_t f = 0; f < n; ++f) lh[f] = g.length_d(static_cast<int>(f)) * pd.right[f];
    std::vector<double> mlh(n);
    k.matvec(m.data(), n, n, lh.data(), mlh.data());
    double deriv = -k.dot(pd.left.data(), mlh.data(), n) / k.dot(pd.left.data(), pd.right.data(), n);
    double next = s - (pd.rho - 1.0) / deriv;
    PerronData trial = perron(transition_matrix(g, next), n, true);
    if (std::abs(trial.rho - 1.0) >= std::abs(pd.rho - 1.0)) break;
    s = next;
    pd = std::move(trial);
    ++w.newton_steps;
  }

  w.delta = s;
  w.rho_residual = std::abs(pd.rho - 1.0);
  w.matrix = transition_matrix(g, s);
  w.right = std::move(pd.right);
  double base_mass = 0.0;
  for (int f : g.out_edges(g.base_vertex())) base_mass += w.weight(f) * w.right[f];
  for (double& x : w.right) x /= base_mass;
  w.left = std::move(pd.left);
  double scale = k.dot(w.left.data(), w.right.data(), n);
  for (double& x : w.left) x /= scale;
  return w;
}

// --- Poincare series --------------------------------------------------------

LengthProfile path_profile(const MetricGraph& g, int from, const Rational& budget) {
  std::size_t n = static_cast<std::size_t>(g.num_directed_edges());
  LengthProfile done;
  LengthProfile frontier;
  for (int f : g.out_edges(from)) {
    if (g.length(f) > budget) continue;
    auto& row = frontier[g.length(f)];
    row.resize(n, 0.0);
    row[f] += 1.0;
  }
  while (!frontier.empty()) {
    auto node = frontier.extract(frontier.begin());
    const Rational& len = node.key();
    const std::vector<double>& counts = node.mapped();
    for (std::size_t e = 0; e < n; ++e) {
      if (counts[e] == 0.0) continue;
      for (int f : g.out_edges(g.head(static_cast<int>(e)))) {
        if (f == reverse_edge(static_cast<int>(e))) continue;
        Rational next = len + g.length(f);
        if (next > budget) continue;
        auto& row = frontier[next];
        row.resize(n, 0.0);
        row[f] += counts[e];
      }
    }
    done.insert(std::move(node));
  }
  return done;
}

namespace {

double profile_sum(const MetricGraph& g, const LengthProfile& prof, int target, double s) {
  double total = 0.0;
  for (const auto& [len, counts] : prof) {
    double paths = 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
      if (g.head(static_cast<int>(e)) == target) paths += counts[e];
    }
    if (paths != 0.0) total += paths * std::exp(-s * to_double(len));
  }
  return total;
}

}  // namespace

double poincare_partial(const MetricGraph& g, double s, const TreePoint& p, const TreePoint& q, const Rational& radius,
                        std::size_t cap) {
  if (s < 0 || radius < 0) throw Error(ErrorCode::InvalidArgument, "need s >= 0 and radius >= 0");
  if (!p.is_vertex() || !q.is_vertex()) return poincare_partial_explicit(g, s, p, q, radius, cap);
  int vp = quotient_vertex(g, p);
  int vq = quotient_vertex(g, q);
  double total = vp == vq ? 1.0 : 0.0;
  return total + profile_sum(g, path_profile(g, vp, radius), vq, s);
}

double poincare_partial_explicit(const MetricGraph& g, double s, const TreePoint& p, const TreePoint& q,
                                 const Rational& radius, std::size_t cap) {
  if (s < 0 || radius < 0) throw Error(ErrorCode::InvalidArgument, "need s >= 0 and radius >= 0");
  // Lifts of q are make_point(Q, q.edge, q.offset) for reduced root paths Q
  // ending over q's anchor vertex.
  int vq = quotient_vertex(g, q.is_vertex() ? q : vertex_at(q.path));
  Rational max_len = 0;
  for (const auto& e : g.edges()) max_len = std::max(max_len, e.length);
  Rational pos_p = path_length(g, p.path) + p.offset;
  Rational reach = radius + max_len + pos_p;

  double total = 0.0;
  std::size_t visited = 0;
  EdgePath path;
  std::function<void(int, const Rational&)> visit = [&](int v, const Rational& len) {
    if (++visited > cap) throw Error(ErrorCode::BallTooLarge, "orbit enumeration exceeded " + std::to_string(cap));
    if (v == vq) {
      TreePoint lift = q.is_vertex() ? vertex_at(path) : make_point(g, path, q.edge, q.offset);
      Rational d = tree_distance(g, p, lift);
      if (d <= radius) total += std::exp(-s * to_double(d));
    }
    for (int f : g.out_edges(v)) {
      if (!path.empty() && f == reverse_edge(path.back())) continue;
      Rational next = len + g.length(f);
      if (next > reach) continue;
      path.push_back(f);
      visit(g.head(f), next);
      path.pop_back();
    }
  };
  visit(g.base_vertex(), Rational(0));
  return total;
}

double orbit_count(const MetricGraph& g, int v, const Rational& t) {
  return 1.0 + profile_sum(g, path_profile(g, v, t), v, 0.0);
}

GrowthSlope growth_slope(const MetricGraph& g, const Rational& t) {
  int v = g.base_vertex();
  LengthProfile prof = path_profile(g, v, t);
  double full = 1.0;
  double half = 1.0;
  Rational half_t = t / 2;
  for (const auto& [len, counts] : prof) {
    double paths = 0.0;
    for (std::size_t e = 0; e < counts.size(); ++e) {
      if (g.head(static_cast<int>(e)) == v) paths += counts[e];
    }
    full += paths;
    if (len <= half_t) half += paths;
  }
  double td = to_double(t);
  return GrowthSlope{std::log(full) / td, (std::log(full) - std::log(half)) / (td / 2)};
}

// --- boundary measures ------------------------------------------------------

std::vector<EndCylinder> cylinders_at_depth(const MetricGraph& g, const TreePoint& p, int depth) {
  if (!p.is_vertex()) throw Error(ErrorCode::InvalidArgument, "cylinders are anchored at vertices");
  std::vector<EdgePath> layer;
  for (int f : g.out_edges(quotient_vertex(g, p))) layer.push_back({f});
  for (int k = 1; k < depth; ++k) {
    std::vector<EdgePath> next;
    for (const auto& path : layer) {
      for (int f : g.out_edges(g.head(path.back()))) {
        if (f == reverse_edge(path.back())) continue;
        next.push_back(path);
        next.back().push_back(f);
      }
    }
    layer = std::move(next);
  }
  std::vector<EndCylinder> out;
  out.reserve(layer.size());
  for (auto& path : layer) out.push_back(EndCylinder{p, std::move(path)});
  return out;
}

double gibbs_total_mass(const GibbsWeights& w, const TreePoint& p) {
  if (p.is_vertex()) {
    double t = 0.0;
    for (int f : w.graph.out_edges(quotient_vertex(w.graph, p))) t += w.weight(f) * w.right[f];
    return t;
  }
  double len = w.graph.length_d(p.edge);
  double off = to_double(p.offset);
  return std::exp(-w.delta * (len - off)) * w.right[p.edge] +
         std::exp(-w.delta * off) * w.right[reverse_edge(p.edge)];
}

double gibbs_half_tree_measure(const GibbsWeights& w, const TreePoint& p, const HalfTree& h) {
  const MetricGraph& g = w.graph;
  TreePoint head = half_tree_head(g, h);
  Rational du = tree_distance(g, p, h.tail);
  Rational dw = tree_distance(g, p, head);
  if (du - dw == g.length(h.edge)) {
    // p sits beyond the edge: take the complement.
    return gibbs_total_mass(w, p) - gibbs_half_tree_measure(w, p, reversed(g, h));
  }
  return std::exp(-w.delta * to_double(dw)) * w.right[h.edge];
}

double gibbs_cylinder_measure(const GibbsWeights& w, const TreePoint& p, const EndCylinder& c) {
  if (c.full_boundary()) return gibbs_total_mass(w, p);
  return gibbs_half_tree_measure(w, p, cylinder_half_tree(w.graph, c));
}

double CylinderMeasure::total() const {
  double t = 0.0;
  for (const auto& m : masses) {
    if (m.depth == 1) t += m.mass;
  }
  return t;
}

double CylinderMeasure::mass_of(const EndCylinder& c) const {
  for (const auto& m : masses) {
    if (m.cylinder == c) return m.mass;
  }
  throw Error(ErrorCode::InvalidArgument, "cylinder not in table");
}

CylinderMeasure gibbs_measure_table(const GibbsWeights& w, const TreePoint& p, int max_depth) {
  CylinderMeasure out;
  out.basepoint = p;
  out.source = MeasureSource::GibbsExact;
  out.s = w.delta;
  for (int k = 1; k <= max_depth; ++k) {
    for (auto& c : cylinders_at_depth(w.graph, p, k)) {
      double m = gibbs_cylinder_measure(w, p, c);
      out.masses.push_back(CylinderMass{std::move(c), k, m});
    }
  }
  return out;
}

CylinderMeasure patterson_measure_approx(const GibbsWeights& w, const TreePoint& p, double s, const Rational& radius,
                                         int max_depth) {
  if (!(s > w.delta)) {
    throw Error(ErrorCode::SubcriticalS, "s = " + std::to_string(s) + " is not above delta = " +
                                             std::to_string(w.delta));
  }
  const MetricGraph& g = w.graph;
  int v = quotient_vertex(g, p);
  std::size_t n = static_cast<std::size_t>(g.num_directed_edges());

  // cont(e, B): weighted reduced continuations after edge e (possibly empty)
  // that end over v within length B.
  std::map<std::pair<int, Rational>, double> memo;
  auto cont = [&](int e, const Rational& budget) {
    auto key = std::make_pair(e, budget);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    double total = g.head(e) == v ? 1.0 : 0.0;
    LengthProfile frontier;
    for (int f : g.out_edges(g.head(e))) {
      if (f == reverse_edge(e) || g.length(f) > budget) continue;
      auto& row = frontier[g.length(f)];
      row.resize(n, 0.0);
      row[f] += 1.0;
    }
    while (!frontier.empty()) {
      auto node = frontier.extract(frontier.begin());
      const auto& counts = node.mapped();
      double paths = 0.0;
      for (std::size_t x = 0; x < n; ++x) {
        if (counts[x] == 0.0) continue;
        if (g.head(static_cast<int>(x)) == v) paths += counts[x];
        for (int f : g.out_edges(g.head(static_cast<int>(x)))) {
          if (f == reverse_edge(static_cast<int>(x))) continue;
          Rational next = node.key() + g.length(f);
          if (next > budget) continue;
          auto& row = frontier[next];
          row.resize(n, 0.0);
          row[f] += counts[x];
        }
      }
      total += paths * std::exp(-s * to_double(node.key()));
    }
    memo.emplace(key, total);
    return total;
  };

  CylinderMeasure out;
  out.basepoint = p;
  out.source = MeasureSource::PattersonTruncation;
  out.s = s;
  out.radius = radius;
  for (int k = 1; k <= max_depth; ++k) {
    for (auto& c : cylinders_at_depth(g, p, k)) {
      Rational len = path_length(g, c.path);
      double m = len > radius ? 0.0 : std::exp(-s * to_double(len)) * cont(c.path.back(), radius - len);
      out.masses.push_back(CylinderMass{std::move(c), k, m});
    }
  }
  double norm = out.total();
  if (norm <= 0.0) throw Error(ErrorCode::InvalidArgument, "radius too small: no orbit points besides p");
  for (auto& m : out.masses) m.mass /= norm;
  return out;
}

double conformality_residual(const GibbsWeights& w, const TreePoint& p, const TreePoint& q, int depth) {
  const MetricGraph& g = w.graph;
  if (!p.is_vertex() || !q.is_vertex()) throw Error(ErrorCode::InvalidArgument, "p and q must be vertices");
  // Edges from p to q. For a cylinder path c leaving p, the far vertex of c
  // sits at d(p, q) + |c| - 2 |common prefix of c and route| from q.
  EdgePath route = concat_reduce(reverse_path(p.path), q.path);
  Rational dpq = path_length(g, route);
  double worst = 0.0;
  for (const auto& c : cylinders_at_depth(g, p, depth)) {
    std::size_t k = 0;
    while (k < c.path.size() && k < route.size() && c.path[k] == route[k]) ++k;
    if (k == c.path.size() && k < route.size()) {
      throw Error(ErrorCode::DepthTooShallow,
                  "b(q, p) is not constant on cylinder " + cylinder_str(g, c) + "; increase depth");
    }
    Rational dp = path_length(g, c.path);
    Rational dq = dpq + dp - 2 * path_length(g, std::span<const int>(c.path.data(), k));
    HalfTree h = cylinder_half_tree(g, c);
    double b = to_double(busemann(g, representative_end(g, h), q, p));
    double right = w.right[h.edge];
    double mp = std::exp(-w.delta * to_double(dp)) * right;
    double mq = std::exp(-w.delta * to_double(dq)) * right;
    worst = std::max(worst, std::abs(std::log(mq / mp) + w.delta * b));
  }
  return worst;
}

double additivity_residual(const GibbsWeights& w, const TreePoint& p, int max_depth) {
  const MetricGraph& g = w.graph;
  double worst = std::abs(gibbs_total_mass(w, p) - [&] {
    double t = 0.0;
    for (const auto& c : cylinders_at_depth(g, p, 1)) t += gibbs_cylinder_measure(w, p, c);
    return t;
  }());
  for (int k = 1; k < max_depth; ++k) {
    for (const auto& c : cylinders_at_depth(g, p, k)) {
      double children = 0.0;
      for (int f : g.out_edges(g.head(c.path.back()))) {
        if (f == reverse_edge(c.path.back())) continue;
        EndCylinder child = c;
        child.path.push_back(f);
        children += gibbs_cylinder_measure(w, p, child);
      }
      worst = std::max(worst, std::abs(gibbs_cylinder_measure(w, p, c) - children));
    }
  }
  return worst;
}

ShadowReport shadow_lemma_check(const GibbsWeights& w, const TreePoint& p, const Rational& r, int word_radius) {
  const MetricGraph& g = w.graph;
  ShadowReport rep;
  double total = gibbs_total_mass(w, p);
  double cr = total * std::exp(w.delta * to_double(r));
  for (const Word& gamma : enumerate_words(g.rank(), word_radius)) {
    TreePoint y = act(g, gamma, p);
    double d = to_double(tree_distance(g, p, y));
    double mass = gibbs_cylinder_measure(w, p, shadow(g, p, y, r));
    double ratio = mass / (cr * std::exp(-w.delta * d));
    ++rep.checked;
    if (ratio > 1.0) ++rep.violations;
    if (ratio > rep.max_ratio) {
      rep.max_ratio = ratio;
      rep.worst = gamma.str();
    }
  }
  return rep;
}

}  // namespace treeflow
