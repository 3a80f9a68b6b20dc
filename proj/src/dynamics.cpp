#include "treeflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "treeflow/error.hpp"
#include "treeflow/kernels.hpp"

namespace treeflow {

bool EdgeShift::is_primitive() const {
  int n = states();
  std::vector<char> a(static_cast<std::size_t>(n * n), 0);
  for (int e = 0; e < n; ++e) {
    for (int f = 0; f < n; ++f) a[e * n + f] = admissible(e, f) ? 1 : 0;
  }
  // Wielandt: primitive iff A^k > 0 for k = n^2 - 2n + 2.
  std::vector<char> p = a;
  int bound = n * n - 2 * n + 2;
  for (int k = 1; k < bound; ++k) {
    std::vector<char> next(p.size(), 0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        if (!p[i * n + j]) continue;
        for (int l = 0; l < n; ++l) next[i * n + l] |= a[j * n + l];
      }
    }
    p = std::move(next);
  }
  return std::all_of(p.begin(), p.end(), [](char c) { return c != 0; });
}

BMQuotientMeasure::BMQuotientMeasure(GibbsWeights w) : w_(std::move(w)) {
  const MetricGraph& g = w_.graph;
  int n = g.num_directed_edges();
  pi_.resize(n);
  for (int d = 0; d < n; ++d) pi_[d] = crossing_mass(d);
  double total = kernels::active().sum(pi_.data(), pi_.size());
  for (double& x : pi_) x /= total;

  cumulative_.resize(n);
  for (int e = 0; e < n; ++e) {
    double acc = 0.0;
    for (int f : g.out_edges(g.head(e))) {
      if (f == reverse_edge(e)) continue;
      acc += transition(e, f);
      cumulative_[e].emplace_back(f, acc);
    }
    cumulative_[e].back().second = 1.0;
  }
  occupancy_.resize(n);
  double flow = 0.0;
  for (int d = 0; d < n; ++d) flow += pi_[d] * g.length_d(d);
  for (int d = 0; d < n; ++d) occupancy_[d] = pi_[d] * g.length_d(d) / flow;
}

double BMQuotientMeasure::crossing_mass(int d) const {
  return w_.weight(d) * w_.right[d] * w_.right[reverse_edge(d)];
}

double BMQuotientMeasure::total_flow_mass() const {
  double t = 0.0;
  for (int d = 0; d < graph().num_directed_edges(); ++d) t += graph().length_d(d) * crossing_mass(d);
  return t;
}

double BMQuotientMeasure::occupancy(int d) const { return occupancy_[d]; }

double BMQuotientMeasure::transition(int e, int f) const {
  std::size_t n = w_.size();
  return w_.matrix[static_cast<std::size_t>(e) * n + static_cast<std::size_t>(f)] * w_.right[f] / w_.right[e];
}

int BMQuotientMeasure::sample_successor(int e, double u) const {
  for (const auto& [f, c] : cumulative_[e]) {
    if (u < c) return f;
  }
  return cumulative_[e].back().first;
}

double bm_pair_mass(const BMQuotientMeasure& m, const EndCylinder& c_minus, const EndCylinder& c_plus,
                    const TreePoint& p) {
  const MetricGraph& g = m.graph();
  HalfTree h1 = cylinder_half_tree(g, c_minus);
  HalfTree h2 = cylinder_half_tree(g, c_plus);
  if (!half_trees_disjoint(g, h1, h2)) {
    throw Error(ErrorCode::OverlappingCylinders, cylinder_str(g, c_minus) + " meets " + cylinder_str(g, c_plus));
  }
  TreePoint w1 = half_tree_head(g, h1);
  TreePoint w2 = half_tree_head(g, h2);
  auto beyond = [&](const HalfTree& h, const TreePoint& w) {
    return p != w && tree_distance(g, p, h.tail) - tree_distance(g, p, w) == g.length(h.edge);
  };
  if (beyond(h1, w1) || beyond(h2, w2)) {
    throw Error(ErrorCode::OverlappingCylinders, "basepoint " + point_str(g, p) + " lies inside a cylinder");
  }
  // Every geodesic of the rectangle contains [w1, w2].
  Rational b = -(tree_distance(g, p, w1) + tree_distance(g, p, w2) - tree_distance(g, w1, w2));
  const GibbsWeights& w = m.weights();
  return std::exp(-w.delta * to_double(b)) * gibbs_half_tree_measure(w, p, h1) * gibbs_half_tree_measure(w, p, h2);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1p-53; }

Rng stream_rng(std::uint64_t master, std::uint64_t index) {
  // splitmix64 finalizer
  std::uint64_t z = master + index * 0x9e3779b97f4a7c15ULL + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return Rng(z ^ (z >> 31));
}

FlowState sample_stationary(const BMQuotientMeasure& m, Rng& rng) {
  double u = uniform01(rng);
  int n = m.graph().num_directed_edges();
  int e = n - 1;
  double acc = 0.0;
  for (int d = 0; d < n; ++d) {
    acc += m.occupancy(d);
    if (u < acc) {
      e = d;
      break;
    }
  }
  return FlowState{e, uniform01(rng) * m.graph().length_d(e)};
}

FlowState flow_step(const BMQuotientMeasure& m, FlowState s, double dt, Rng& rng) {
  if (dt < 0) throw Error(ErrorCode::InvalidArgument, "negative time step");
  s.phase += dt;
  while (s.phase >= m.graph().length_d(s.edge)) {
    s.phase -= m.graph().length_d(s.edge);
    s.edge = m.sample_successor(s.edge, uniform01(rng));
  }
  return s;
}

Observable Observable::constant() {
  Observable o;
  o.label = "one";
  return o;
}

Observable Observable::indicator(std::vector<int> edges, std::string label) {
  Observable o;
  o.kind = Kind::EdgeIndicator;
  o.edges = std::move(edges);
  o.label = std::move(label);
  return o;
}

Observable Observable::circle(const MetricGraph& g, double period) {
  Observable o;
  o.kind = Kind::Circle;
  o.period = period;
  o.label = "circle";
  for (int v = 0; v < g.num_vertices(); ++v) {
    double t = std::fmod(to_double(path_length(g, g.tree_path(v))), period);
    o.theta.push_back(t);
  }
  return o;
}

double Observable::value(const MetricGraph& g, const FlowState& s) const {
  switch (kind) {
    case Kind::Constant:
      return 1.0;
    case Kind::EdgeIndicator:
      return std::find(edges.begin(), edges.end(), s.edge) != edges.end() ? 1.0 : 0.0;
    case Kind::Circle:
      return std::cos(2.0 * std::numbers::pi * (theta[g.tail(s.edge)] + s.phase) / period);
  }
  return 0.0;
}

double Observable::integral(const MetricGraph& g, int e, double a, double b) const {
  switch (kind) {
    case Kind::Constant:
      return b - a;
    case Kind::EdgeIndicator:
      return std::find(edges.begin(), edges.end(), e) != edges.end() ? b - a : 0.0;
    case Kind::Circle: {
      double k = 2.0 * std::numbers::pi / period;
      double th = theta[g.tail(e)];
      return (std::sin(k * (th + b)) - std::sin(k * (th + a))) / k;
    }
  }
  return 0.0;
}

double Observable::space_average(const BMQuotientMeasure& m) const {
  const MetricGraph& g = m.graph();
  double num = 0.0;
  double den = 0.0;
  for (int d = 0; d < g.num_directed_edges(); ++d) {
    num += m.pi()[d] * integral(g, d, 0.0, g.length_d(d));
    den += m.pi()[d] * g.length_d(d);
  }
  return num / den;
}

BirkhoffResult birkhoff_vs_space_average(const BMQuotientMeasure& m, const Observable& f, double horizon,
                                         std::uint64_t seed) {
  constexpr int kBatches = 50;
  const MetricGraph& g = m.graph();
  Rng rng = stream_rng(seed, 0);
  FlowState s = sample_stationary(m, rng);
  double batch_len = horizon / kBatches;
  std::vector<double> batch(kBatches, 0.0);
  for (int b = 0; b < kBatches; ++b) {
    double remaining = batch_len;
    double acc = 0.0;
    while (remaining > 0.0) {
      double left = g.length_d(s.edge) - s.phase;
      if (left > remaining) {
        acc += f.integral(g, s.edge, s.phase, s.phase + remaining);
        s.phase += remaining;
        remaining = 0.0;
      } else {
        acc += f.integral(g, s.edge, s.phase, g.length_d(s.edge));
        remaining -= left;
        s.edge = m.sample_successor(s.edge, uniform01(rng));
        s.phase = 0.0;
      }
    }
    batch[b] = acc / batch_len;
  }
  BirkhoffResult out;
  out.space_average = f.space_average(m);
  double s1 = 0.0;
  double s2 = 0.0;
  kernels::active().moments(batch.data(), batch.size(), out.space_average, &s1, &s2);
  out.time_average = out.space_average + s1 / kBatches;
  double var = (s2 - s1 * s1 / kBatches) / (kBatches - 1);
  out.std_error = std::sqrt(std::max(var, 0.0) / kBatches);
  return out;
}

std::vector<CorrelationPoint> correlation(const BMQuotientMeasure& m, const Observable& f, const Observable& g,
                                          const std::vector<double>& times, int samples, std::uint64_t seed) {
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "need at least one trajectory");
  if (!std::is_sorted(times.begin(), times.end()) || (!times.empty() && times.front() < 0)) {
    throw Error(ErrorCode::InvalidArgument, "correlation times must be sorted and nonnegative");
  }
  const MetricGraph& gr = m.graph();
  double mf = f.space_average(m);
  double mg = g.space_average(m);
  std::size_t nt = times.size();
  std::size_t ns = static_cast<std::size_t>(samples);
  // products[t * ns + i]
  std::vector<double> products(nt * ns);
  for (std::size_t i = 0; i < ns; ++i) {
    Rng rng = stream_rng(seed, i);
    FlowState s = sample_stationary(m, rng);
    double f0 = f.value(gr, s) - mf;
    double now = 0.0;
    for (std::size_t k = 0; k < nt; ++k) {
      s = flow_step(m, s, times[k] - now, rng);
      now = times[k];
      products[k * ns + i] = f0 * (g.value(gr, s) - mg);
    }
  }
  std::vector<CorrelationPoint> out;
  for (std::size_t k = 0; k < nt; ++k) {
    double s1 = 0.0;
    double s2 = 0.0;
    kernels::active().moments(products.data() + k * ns, ns, 0.0, &s1, &s2);
    double mean = s1 / static_cast<double>(ns);
    double var = ns > 1 ? (s2 - s1 * mean) / static_cast<double>(ns - 1) : 0.0;
    out.push_back(CorrelationPoint{times[k], mean, std::sqrt(std::max(var, 0.0) / static_cast<double>(ns))});
  }
  return out;
}

std::string MixingVerdict::str() const {
  switch (kind) {
    case Kind::NotMixing:
      return "VERDICT=NOT_MIXING c=" + to_string(c);
    case Kind::MixingLikely:
      return "VERDICT=MIXING_LIKELY c=NA";
    case Kind::Inconclusive:
      return "VERDICT=INCONCLUSIVE c=NA";
  }
  return "VERDICT=?";
}

MixingVerdict mixing_verdict(const MetricGraph& g, const MixingBudget& budget) {
  if (budget.t_step <= 0 || budget.t_max < budget.t_min || budget.t_min < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad correlation time grid");
  }
  std::vector<Rational> lengths;
  for (const auto& e : g.edges()) lengths.push_back(e.length);
  MixingVerdict out;
  out.lattice = arithmeticity(lengths, g.inexact(), budget.lattice);
  bool arithmetic = out.lattice.kind == ArithmeticityVerdict::Kind::Arithmetic;
  if (arithmetic) {
    out.kind = MixingVerdict::Kind::NotMixing;
    out.c = out.lattice.c;
    if (!budget.full_series) return out;
  }

  std::vector<double> times{0.0};
  if (budget.full_series) {
    for (long k = 1; k * budget.t_step <= budget.t_max + 1e-9; ++k) times.push_back(static_cast<double>(k) * budget.t_step);
  } else {
    for (double t = budget.t_min; t <= budget.t_max + 1e-9; t += budget.t_step) times.push_back(t);
  }
  BMQuotientMeasure m(critical_exponent(g));
  double period = arithmetic ? to_double(out.c) : to_double(g.min_length());
  Observable circ = Observable::circle(g, period);
  out.evidence = correlation(m, circ, circ, times, budget.samples, budget.seed);
  if (arithmetic) return out;

  double c0 = std::abs(out.evidence.front().corr);
  bool decayed = std::all_of(out.evidence.begin() + 1, out.evidence.end(), [&](const CorrelationPoint& p) {
    return p.t < budget.t_min - 1e-9 || std::abs(p.corr) <= budget.decay * c0;
  });
  out.kind = decayed ? MixingVerdict::Kind::MixingLikely : MixingVerdict::Kind::Inconclusive;
  return out;
}

}  // namespace treeflow
