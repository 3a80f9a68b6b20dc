#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "support.hpp"
#include "treeflow/error.hpp"
#include "treeflow/patterson.hpp"

using namespace treeflow;

namespace {

MetricGraph unit_rose() { return make_rose({Rational(1), Rational(1)}); }

TreePoint at(const MetricGraph& g, const char* w) { return vertex_at(g.loop_of(Word::parse(w, g.rank()))); }

double oracle_cylinder(const MetricGraph& g, double delta, const std::vector<double>& h, const EdgePath& path) {
  return std::exp(-delta * to_double(path_length(g, path))) * h[path.back()];
}

// Orbit sum by listing words: each word is one orbit point of the base.
double word_sum(const MetricGraph& g, double s, double radius, int max_word) {
  double acc = 0;
  for (const Word& w : enumerate_words(g.rank(), max_word)) {
    double d = to_double(path_length(g, g.loop_of(w)));
    if (d <= radius + 1e-12) acc += std::exp(-s * d);
  }
  return acc;
}

}  // namespace

TEST(CriticalExponent, RoseOracle) {
  for (const auto& lens : std::vector<std::vector<int>>{{1, 1}, {1, 1, 1}, {2, 2}, {1, 2}, {2, 3}, {1, 1, 3}}) {
    std::vector<Rational> q(lens.begin(), lens.end());
    std::vector<double> d(lens.begin(), lens.end());
    GibbsWeights w = critical_exponent(make_rose(q));
    EXPECT_NEAR(w.delta, oracle::rose_delta(d), 1e-10);
    EXPECT_LE(w.rho_residual, 1e-12);
  }
  EXPECT_NEAR(critical_exponent(unit_rose()).delta, std::log(3.0), 1e-12);
  EXPECT_NEAR(critical_exponent(make_rose({1, 1, 1})).delta, std::log(5.0), 1e-12);
  EXPECT_NEAR(critical_exponent(make_rose({2, 2})).delta, std::log(3.0) / 2, 1e-12);
}

TEST(CriticalExponent, SpectralRadiusDecreasing) {
  MetricGraph g(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  double prev = spectral_radius(g, 0.01);
  for (double s = 0.05; s < 4; s += 0.05) {
    double r = spectral_radius(g, s);
    EXPECT_LT(r, prev) << s;
    prev = r;
  }
  GibbsWeights w = critical_exponent(g);
  EXPECT_NEAR(spectral_radius(g, w.delta), 1.0, 1e-12);
}

TEST(CriticalExponent, GrowthSlopeAgrees) {
  for (const MetricGraph& g : {unit_rose(), make_rose({1, 2}), make_rose({1, 1, 1})}) {
    GibbsWeights w = critical_exponent(g);
    GrowthSlope slope = growth_slope(g, 20 * g.min_length());
    EXPECT_NEAR(slope.secant, w.delta, 2e-2);
  }
}

TEST(Poincare, WordCountsAndTails) {
  MetricGraph g = unit_rose();
  EXPECT_DOUBLE_EQ(poincare_partial(g, 0.0, root_vertex(), root_vertex(), 0), 1.0);
  EXPECT_DOUBLE_EQ(poincare_partial(g, 0.0, root_vertex(), root_vertex(), 2), 17.0);
  // word length k contributes 4 3^(k-1) e^(-2k)
  auto shell_sum = [](int from, int to) {
    double acc = 0;
    for (int k = from; k <= to; ++k) acc += 4 * std::pow(3.0, k - 1) * std::exp(-2.0 * k);
    return acc;
  };
  double s5 = poincare_partial(g, 2.0, root_vertex(), root_vertex(), 5);
  double s10 = poincare_partial(g, 2.0, root_vertex(), root_vertex(), 10);
  double s15 = poincare_partial(g, 2.0, root_vertex(), root_vertex(), 15);
  EXPECT_NEAR(s5, 1 + shell_sum(1, 5), 1e-12);
  EXPECT_NEAR(s10 - s5, shell_sum(6, 10), 1e-12);
  EXPECT_NEAR(s15 - s10, shell_sum(11, 15), 1e-12);
  // the 5 -> 10 step is about 1e-2; the series is Cauchy from 10 on
  EXPECT_LT(std::abs(s15 - s10), 1e-3);
}

TEST(Poincare, MatchesWordEnumeration) {
  MetricGraph g = make_rose({1, 2});
  for (double s : {0.0, 0.5, 1.5}) {
    for (int r : {0, 3, 6, 8}) {
      double oracle = word_sum(g, s, r, r);
      EXPECT_NEAR(poincare_partial(g, s, root_vertex(), root_vertex(), r), oracle, 1e-9 * std::max(1.0, oracle));
      EXPECT_NEAR(poincare_partial_explicit(g, s, root_vertex(), root_vertex(), r), oracle,
                  1e-9 * std::max(1.0, oracle));
    }
  }
}

TEST(Poincare, BallCap) {
  MetricGraph g = unit_rose();
  try {
    poincare_partial_explicit(g, 1.0, root_vertex(), root_vertex(), 12, 1000);
    FAIL() << "expected BallTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BallTooLarge);
  }
}

TEST(Gibbs, WorkedMasses) {
  GibbsWeights w = critical_exponent(unit_rose());
  EXPECT_NEAR(gibbs_cylinder_measure(w, root_vertex(), {root_vertex(), {0}}), 0.25, 1e-12);
  EXPECT_NEAR(gibbs_cylinder_measure(w, root_vertex(), {root_vertex(), {0, 0}}), 1.0 / 12, 1e-12);
  EXPECT_NEAR(gibbs_cylinder_measure(w, root_vertex(), {root_vertex(), {0, 0, 2}}), 1.0 / 36, 1e-12);
  EXPECT_NEAR(gibbs_total_mass(w, root_vertex()), 1.0, 1e-12);
}

TEST(Gibbs, MatchesPowerIterationOracle) {
  for (const MetricGraph& g : {make_rose({1, 2}), make_rose({2, 3}), make_rose({1, 1, 3})}) {
    GibbsWeights w = critical_exponent(g);
    std::vector<double> lens;
    for (int e = 0; e < g.num_edges(); ++e) lens.push_back(g.length_d(2 * e));
    double delta = oracle::rose_delta(lens);
    auto h = oracle::rose_edge_mass(g, delta);
    for (int depth = 1; depth <= 4; ++depth) {
      for (const EndCylinder& c : cylinders_at_depth(g, root_vertex(), depth)) {
        double want = oracle_cylinder(g, delta, h, c.path);
        EXPECT_NEAR(gibbs_cylinder_measure(w, root_vertex(), c), want, 1e-10 * std::max(1.0, want));
      }
    }
  }
}

TEST(Gibbs, RefinementAndTotalMass) {
  MetricGraph g(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  GibbsWeights w = critical_exponent(g);
  for (const TreePoint& p : {root_vertex(), vertex_at({0}), vertex_at({0, 3})}) {
    EXPECT_LE(additivity_residual(w, p, 5), 1e-10);
    double total = gibbs_total_mass(w, p);
    for (int depth = 1; depth <= 5; ++depth) {
      double acc = 0;
      for (const EndCylinder& c : cylinders_at_depth(g, p, depth)) {
        double m = gibbs_cylinder_measure(w, p, c);
        EXPECT_GT(m, 0.0);
        acc += m;
      }
      EXPECT_NEAR(acc, total, 1e-10);
    }
  }
}

TEST(Gibbs, NonAtomic) {
  GibbsWeights w = critical_exponent(make_rose({1, 2}));
  double prev = 1;
  for (int depth = 1; depth <= 10; ++depth) {
    double biggest = 0;
    for (const EndCylinder& c : cylinders_at_depth(w.graph, root_vertex(), depth))
      biggest = std::max(biggest, gibbs_cylinder_measure(w, root_vertex(), c));
    EXPECT_LT(biggest, prev);
    prev = biggest;
  }
  EXPECT_LT(prev, 1e-2);
}

TEST(Gibbs, ScalingCovariance) {
  MetricGraph g = make_rose({1, 2});
  GibbsWeights a = critical_exponent(g);
  GibbsWeights b = critical_exponent(g.scaled(ratio(3, 2)));
  EXPECT_NEAR(b.delta, a.delta / 1.5, 1e-12);
  for (const EndCylinder& c : cylinders_at_depth(g, root_vertex(), 3))
    EXPECT_NEAR(gibbs_cylinder_measure(a, root_vertex(), c), gibbs_cylinder_measure(b, root_vertex(), c), 1e-12);
}

TEST(Conformality, WorkedRatio) {
  MetricGraph g = unit_rose();
  GibbsWeights w = critical_exponent(g);
  EndCylinder c{root_vertex(), {0, 0}};
  double mp = gibbs_cylinder_measure(w, root_vertex(), c);
  double mq = gibbs_cylinder_measure(w, at(g, "a"), c);
  EXPECT_NEAR(mq / mp, 3.0, 1e-10);
  EXPECT_LE(conformality_residual(w, root_vertex(), root_vertex(), 4), 1e-12);
}

TEST(Conformality, VertexPairsWithinFour) {
  for (const MetricGraph& g : {unit_rose(), make_rose({1, 2})}) {
    GibbsWeights w = critical_exponent(g);
    for (const Word& x : enumerate_words(2, 2)) {
      for (const Word& y : enumerate_words(2, 2)) {
        TreePoint p = vertex_at(g.loop_of(x));
        TreePoint q = vertex_at(g.loop_of(y));
        if (tree_distance(g, p, q) > 4) continue;
        EXPECT_LE(conformality_residual(w, p, q, 8), 1e-9) << x.str() << " " << y.str();
      }
    }
  }
}

TEST(ShadowLemma, WorkedRatioAndSweep) {
  MetricGraph g = unit_rose();
  GibbsWeights w = critical_exponent(g);
  TreePoint y = at(g, "aa");
  double mass = gibbs_cylinder_measure(w, root_vertex(), shadow(g, root_vertex(), y, ratio(1, 2)));
  double bound = std::exp(0.5 * w.delta) * std::exp(-2 * w.delta);
  EXPECT_NEAR(mass, 1.0 / 12, 1e-12);
  EXPECT_NEAR(mass / bound, 0.4330127, 1e-6);
  for (const char* r : {"1/2", "1", "2"}) {
    ShadowReport rep = shadow_lemma_check(w, root_vertex(), parse_rational(r).value, 6);
    EXPECT_EQ(rep.violations, 0u) << r;
    EXPECT_LE(rep.max_ratio, 1.0) << r;
    EXPECT_GT(rep.checked, 1000u);
  }
}

TEST(PattersonApprox, NearGibbsOnUnitRose) {
  GibbsWeights w = critical_exponent(unit_rose());
  CylinderMeasure m = patterson_measure_approx(w, root_vertex(), 1.2, 14, 2);
  EXPECT_EQ(m.source, MeasureSource::PattersonTruncation);
  EXPECT_NEAR(m.total(), 1.0, 1e-12);
  double a = m.mass_of({root_vertex(), {0}});
  double b = m.mass_of({root_vertex(), {2}});
  EXPECT_GE(a, 0.24);
  EXPECT_LE(a, 0.26);
  EXPECT_NEAR(a, b, 1e-12);
}

TEST(PattersonApprox, Subcritical) {
  GibbsWeights w = critical_exponent(unit_rose());
  try {
    patterson_measure_approx(w, root_vertex(), w.delta, 10, 1);
    FAIL() << "expected SubcriticalS";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SubcriticalS);
  }
}
