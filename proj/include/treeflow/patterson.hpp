#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "treeflow/graph.hpp"
#include "treeflow/rational.hpp"
#include "treeflow/tree.hpp"

namespace treeflow {

// Weighted non-backtracking matrix M(s) over directed edges, row-major:
// M(s)[e][f] = exp(-s * len(f)) when tail(f) == head(e) and f != reverse(e).
std::vector<double> transition_matrix(const MetricGraph& g, double s);

struct PerronData {
  double rho = 0.0;
  std::vector<double> right;  // M h = rho h
  std::vector<double> left;   // u M = rho u
  int iterations = 0;
};

// Power iteration on (M + I)/2 (M itself is periodic on bipartite graphs),
// all-ones start, 1e-14 relative stopping rule.
PerronData perron(const std::vector<double>& m, std::size_t n, bool want_left);
double spectral_radius(const MetricGraph& g, double s);

// Critical exponent and the Perron data of M(delta).
//
// `right` is normalized so the base vertex carries total boundary mass 1.
// `left` is the independently iterated left vector, scaled so left . right
// == 1; the closed form left(e) ~ exp(-delta len(e)) right(reverse e) is
// available as closed_form_left().
struct GibbsWeights {
  MetricGraph graph;
  double delta = 0.0;
  double rho_residual = 0.0;
  int bisection_steps = 0;
  int newton_steps = 0;
  std::vector<double> matrix;
  std::vector<double> right;
  std::vector<double> left;

  std::size_t size() const { return right.size(); }
  double weight(int d) const;  // exp(-delta * len(d))
  std::vector<double> closed_form_left() const;
};

GibbsWeights critical_exponent(const MetricGraph& g);

// --- Poincare series --------------------------------------------------------

inline constexpr std::size_t kDefaultBallCap = 20'000'000;

// Sum over gamma with d(p, gamma q) <= radius of exp(-s d(p, gamma q)).
// Vertex arguments use an aggregated length profile (no cap needed);
// general points fall back to explicit enumeration.
double poincare_partial(const MetricGraph& g, double s, const TreePoint& p, const TreePoint& q,
                        const Rational& radius, std::size_t cap = kDefaultBallCap);
// Explicit enumeration of every orbit point; throws BallTooLarge past `cap`.
double poincare_partial_explicit(const MetricGraph& g, double s, const TreePoint& p, const TreePoint& q,
                                 const Rational& radius, std::size_t cap = kDefaultBallCap);

// Number of reduced edge paths from vertex `from` ending at vertex `to`,
// keyed by exact length and last edge (-1 for the empty path).
using LengthProfile = std::map<Rational, std::vector<double>>;
LengthProfile path_profile(const MetricGraph& g, int from, const Rational& budget);

// |V_t| = #{gamma : d(p, gamma p) <= t} for p a lift of quotient vertex v.
double orbit_count(const MetricGraph& g, int v, const Rational& t);

struct GrowthSlope {
  double ratio = 0.0;   // (1/t) log |V_t|
  double secant = 0.0;  // (log |V_t| - log |V_{t/2}|) / (t/2)
};
GrowthSlope growth_slope(const MetricGraph& g, const Rational& t);

// --- boundary measures ------------------------------------------------------

// Reduced paths of the given depth leaving the vertex p, as cylinders.
std::vector<EndCylinder> cylinders_at_depth(const MetricGraph& g, const TreePoint& p, int depth);

double gibbs_total_mass(const GibbsWeights& w, const TreePoint& p);
double gibbs_half_tree_measure(const GibbsWeights& w, const TreePoint& p, const HalfTree& h);
double gibbs_cylinder_measure(const GibbsWeights& w, const TreePoint& p, const EndCylinder& c);

enum class MeasureSource { PattersonTruncation, GibbsExact };

struct CylinderMass {
  EndCylinder cylinder;
  int depth = 0;
  double mass = 0.0;
};

struct CylinderMeasure {
  TreePoint basepoint;
  MeasureSource source = MeasureSource::GibbsExact;
  double s = 0.0;
  Rational radius = 0;
  std::vector<CylinderMass> masses;  // depth 1..max_depth, depth-major

  double total() const;  // sum over depth-1 cylinders
  double mass_of(const EndCylinder& c) const;
};

// Truncated Patterson construction: atoms gamma p (gamma != 1) with
// d(p, gamma p) <= radius, weights exp(-s d), normalized to total 1, binned
// by the first edges of [p, gamma p). p must be a vertex.
CylinderMeasure patterson_measure_approx(const GibbsWeights& w, const TreePoint& p, double s, const Rational& radius,
                                         int max_depth);
CylinderMeasure gibbs_measure_table(const GibbsWeights& w, const TreePoint& p, int max_depth);

// max over depth-`depth` cylinders c at p of |log(mu_q(c)/mu_p(c)) + delta b(q, p)|.
double conformality_residual(const GibbsWeights& w, const TreePoint& p, const TreePoint& q, int depth);

// max over cylinders of depth < max_depth of |mu(c) - sum of one-edge extensions|.
double additivity_residual(const GibbsWeights& w, const TreePoint& p, int max_depth);

struct ShadowReport {
  double max_ratio = 0.0;
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::string worst;  // word attaining max_ratio
};

// mu_p(O_r(p, gamma p)) <= mu_p(boundary) e^{delta r} e^{-delta d(p, gamma p)}
// for every |gamma| <= word_radius.
ShadowReport shadow_lemma_check(const GibbsWeights& w, const TreePoint& p, const Rational& r, int word_radius);

}  // namespace treeflow
