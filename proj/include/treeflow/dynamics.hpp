#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "treeflow/crossratio.hpp"
#include "treeflow/patterson.hpp"

namespace treeflow {

// Non-backtracking edge shift with roof = edge length.
struct EdgeShift {
  const MetricGraph* graph = nullptr;

  explicit EdgeShift(const MetricGraph& g) : graph(&g) {}
  int states() const { return graph->num_directed_edges(); }
  bool admissible(int e, int f) const {
    return graph->tail(f) == graph->head(e) && f != reverse_edge(e);
  }
  double roof(int e) const { return graph->length_d(e); }
  // Some power of the admissibility matrix is positive. Fails on bipartite
  // graphs, where every closed path has even combinatorial length.
  bool is_primitive() const;
};

// Bowen-Margulis measure of the quotient flow, realized as the suspension
// over the edge shift with the Gibbs kernel P(e -> f) = M_ef h(f) / h(e).
class BMQuotientMeasure {
 public:
  explicit BMQuotientMeasure(GibbsWeights w);

  const GibbsWeights& weights() const { return w_; }
  const MetricGraph& graph() const { return w_.graph; }
  // Stationary distribution of the kernel, sum 1.
  const std::vector<double>& pi() const { return pi_; }
  // Geodesics crossing the directed edge d: exp(-delta l) h(d) h(reverse d).
  double crossing_mass(int d) const;
  // sum_d l(d) crossing_mass(d); finite and positive.
  double total_flow_mass() const;
  // Fraction of flow time spent on d: pi(d) l(d) / sum pi l.
  double occupancy(int d) const;

  double transition(int e, int f) const;
  int sample_successor(int e, double u) const;

 private:
  GibbsWeights w_;
  std::vector<double> pi_;
  std::vector<std::vector<std::pair<int, double>>> cumulative_;  // per state
  std::vector<double> occupancy_;
};

// mu(C- x C+) = exp(-delta beta_p) mu_p(C-) mu_p(C+). Throws
// OverlappingCylinders when the half trees meet or p lies beyond either one
// (beta_p would not be constant on the rectangle).
double bm_pair_mass(const BMQuotientMeasure& m, const EndCylinder& c_minus, const EndCylinder& c_plus,
                    const TreePoint& p);

struct FlowState {
  int edge = 0;
  double phase = 0.0;
  friend bool operator==(const FlowState&, const FlowState&) = default;
};

using Rng = std::mt19937_64;
double uniform01(Rng& rng);
// Stream for trajectory `index` under `master`; independent of scheduling.
Rng stream_rng(std::uint64_t master, std::uint64_t index);

FlowState sample_stationary(const BMQuotientMeasure& m, Rng& rng);
FlowState flow_step(const BMQuotientMeasure& m, FlowState s, double dt, Rng& rng);

// Bounded function of (directed edge, phase).
struct Observable {
  enum class Kind { Constant, EdgeIndicator, Circle };
  Kind kind = Kind::Constant;
  std::vector<int> edges;      // EdgeIndicator
  double period = 1.0;         // Circle: cos(2 pi (theta(tail) + phase) / period)
  std::vector<double> theta;   // Circle: spanning-tree potential per vertex, mod period
  std::string label;

  static Observable constant();
  static Observable indicator(std::vector<int> edges, std::string label);
  static Observable circle(const MetricGraph& g, double period);

  double value(const MetricGraph& g, const FlowState& s) const;
  // Integral over phases [a, b] on edge e.
  double integral(const MetricGraph& g, int e, double a, double b) const;
  double space_average(const BMQuotientMeasure& m) const;
};

struct BirkhoffResult {
  double time_average = 0.0;
  double space_average = 0.0;
  double std_error = 0.0;  // batch means, 50 batches
};
BirkhoffResult birkhoff_vs_space_average(const BMQuotientMeasure& m, const Observable& f, double horizon,
                                         std::uint64_t seed);

struct CorrelationPoint {
  double t = 0.0;
  double corr = 0.0;
  double std_error = 0.0;
};
// C(T) = E[(f - <f>)(g o flow_T - <g>)] over `samples` stationary
// trajectories, with exact space averages.
std::vector<CorrelationPoint> correlation(const BMQuotientMeasure& m, const Observable& f, const Observable& g,
                                          const std::vector<double>& times, int samples, std::uint64_t seed);

struct MixingBudget {
  int samples = 10000;
  double t_min = 50.0;
  double t_max = 100.0;
  double t_step = 5.0;
  std::uint64_t seed = 0;
  double decay = 0.05;
  LatticeFitOptions lattice;
  // Record C(T) on the whole grid 0, t_step, ..., t_max (arithmetic graphs
  // included, with the circle of period c). The decay rule still only
  // looks at T >= t_min.
  bool full_series = false;
};

struct MixingVerdict {
  enum class Kind { NotMixing, MixingLikely, Inconclusive };
  Kind kind = Kind::NotMixing;
  Rational c = 0;
  ArithmeticityVerdict lattice;
  std::vector<CorrelationPoint> evidence;  // first point is T = 0; empty for exact verdicts unless full_series

  std::string str() const;  // VERDICT=... line
};

// Exact graphs: NotMixing(gcd of edge lengths). Inexact graphs: the lattice
// fit decides NotMixing; otherwise the circle-observable correlation must
// fall below decay * |C(0)| on [t_min, t_max] for MixingLikely.
MixingVerdict mixing_verdict(const MetricGraph& g, const MixingBudget& budget);

}  // namespace treeflow
