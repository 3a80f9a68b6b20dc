#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "treeflow/error.hpp"
#include "treeflow/sampling.hpp"
#include "treeflow/tree.hpp"

using namespace treeflow;

namespace {

MetricGraph unit_rose() { return make_rose({Rational(1), Rational(1)}); }

TreePoint at(const MetricGraph& g, const char* w) { return vertex_at(g.loop_of(Word::parse(w, g.rank()))); }

// Distances to a far point of the ray; b_xi(x, y) = D[x] - D[y] once both
// rays have merged before that point.
std::vector<Rational> far_table(const oracle::Unfolding& u, const End& xi, int depth) {
  return u.distances_from(oracle::ray_head(xi, depth));
}

}  // namespace

TEST(TreeDistance, WorkedValues) {
  MetricGraph g = unit_rose();
  EXPECT_EQ(tree_distance(g, at(g, "aa"), at(g, "aa")), Rational(0));
  EXPECT_EQ(tree_distance(g, root_vertex(), at(g, "aa")), Rational(2));
  MetricGraph h = make_rose({Rational(1), Rational(2)});
  EXPECT_EQ(tree_distance(h, root_vertex(), at(h, "ab")), Rational(3));
}

TEST(TreeDistance, MatchesDijkstraOnUnfolding) {
  MetricGraph theta(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  for (const MetricGraph& g : {make_rose({Rational(1), Rational(2)}), theta}) {
    oracle::Unfolding u(g, 5);
    std::mt19937_64 rng(11);
    const auto& nodes = u.nodes();
    for (int i = 0; i < 400; ++i) {
      const EdgePath& x = nodes[rng() % nodes.size()];
      const EdgePath& y = nodes[rng() % nodes.size()];
      EXPECT_EQ(tree_distance(g, vertex_at(x), vertex_at(y)), u.distance(x, y));
    }
  }
}

TEST(TreeDistance, InteriorPoints) {
  MetricGraph g = make_rose({Rational(1), Rational(2)});
  // halfway along b from the root, and halfway along a from there
  TreePoint p = make_point(g, {}, 2, Rational(1));
  EXPECT_EQ(tree_distance(g, root_vertex(), p), Rational(1));
  EXPECT_EQ(tree_distance(g, p, at(g, "b")), Rational(1));
  EXPECT_EQ(tree_distance(g, p, at(g, "a")), Rational(2));
  // walking backwards along an edge canonicalizes toward the root
  TreePoint q = make_point(g, {0}, 1, ratio(1, 4));
  EXPECT_EQ(q, make_point(g, {}, 0, ratio(3, 4)));
}

TEST(TreeDistance, MetricAxiomsOnSamples) {
  MetricGraph g(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  sample::Engine rng(3);
  for (int i = 0; i < 300; ++i) {
    TreePoint x = sample::point(g, rng, 4);
    TreePoint y = sample::point(g, rng, 4);
    TreePoint z = sample::point(g, rng, 4);
    Rational dxy = tree_distance(g, x, y);
    EXPECT_EQ(dxy, tree_distance(g, y, x));
    EXPECT_EQ(dxy == 0, x == y);
    EXPECT_LE(tree_distance(g, x, z), dxy + tree_distance(g, y, z));
  }
}

TEST(Busemann, WorkedValues) {
  MetricGraph g = unit_rose();
  End xi = parse_end(g, "(a)");
  EXPECT_EQ(busemann(g, xi, at(g, "a"), root_vertex()), Rational(-1));
  EXPECT_EQ(busemann(g, xi, at(g, "b"), root_vertex()), Rational(1));
  EXPECT_EQ(busemann(g, xi, at(g, "bA"), at(g, "bA")), Rational(0));
}

TEST(Busemann, MatchesFarPointDistances) {
  MetricGraph g = make_rose({Rational(1), Rational(2)});
  oracle::Unfolding u(g, 8);
  sample::Engine rng(5);
  for (int i = 0; i < 200; ++i) {
    End xi = sample::end(g, rng, 2);
    TreePoint x = sample::vertex(g, rng, 2);
    TreePoint y = sample::vertex(g, rng, 2);
    auto far = far_table(u, xi, 8);
    EXPECT_EQ(busemann(g, xi, x, y), far[u.index(x.path)] - far[u.index(y.path)])
        << end_str(g, xi) << " " << point_str(g, x) << " " << point_str(g, y);
  }
}

TEST(Busemann, TruncatedEndTooShort) {
  MetricGraph g = unit_rose();
  End shallow = make_truncated_end({0});
  try {
    busemann(g, shallow, at(g, "aa"), at(g, "ab"));
    FAIL() << "expected InsufficientDepth";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientDepth);
  }
  End deep = make_truncated_end({0, 0, 0, 0});
  EXPECT_EQ(busemann(g, deep, at(g, "b"), root_vertex()), Rational(1));
}

TEST(Beta, WorkedValues) {
  MetricGraph g = unit_rose();
  End a = parse_end(g, "(a)");
  End b = parse_end(g, "(b)");
  End ab = parse_end(g, "a:(b)");
  EXPECT_EQ(beta(g, root_vertex(), a, b), std::optional<Rational>(0));
  EXPECT_EQ(beta(g, root_vertex(), ab, a), std::optional<Rational>(-2));
  EXPECT_FALSE(beta(g, root_vertex(), a, a).has_value());
}

TEST(Beta, BruteForceInfimum) {
  MetricGraph g = unit_rose();
  const int depth = 8;
  oracle::Unfolding u(g, depth);
  sample::Engine rng(8);
  int checked = 0;
  while (checked < 60) {
    End xi = sample::end(g, rng, 2);
    End eta = sample::end(g, rng, 2);
    if (xi == eta) continue;
    TreePoint p = sample::vertex(g, rng, 2);
    std::optional<Rational> got = beta(g, p, xi, eta);
    ASSERT_TRUE(got.has_value());
    Rational best = oracle::brute_beta(u, depth, depth, p.path, xi, eta);
    EXPECT_EQ(*got, best) << end_str(g, xi) << " " << end_str(g, eta) << " p=" << point_str(g, p);
    ++checked;
  }
}

TEST(TranslationLength, MinimumDisplacementOracle) {
  MetricGraph g = make_rose({Rational(1), Rational(2)});
  oracle::Unfolding u(g, 6);
  EXPECT_EQ(translation_length(g, Word()), Rational(0));
  for (const Word& w : enumerate_words(2, 3)) {
    if (w.is_identity()) continue;
    EdgePath loop = g.loop_of(w);
    Rational best = -1;
    for (const EdgePath& x : u.nodes()) {
      if (x.size() > 3) continue;
      EdgePath gx = concat_reduce(loop, x);
      if (!u.contains(gx)) continue;
      Rational d = u.distance(x, gx);
      if (best < 0 || d < best) best = d;
    }
    EXPECT_EQ(translation_length(g, w), best) << w.str();
  }
}

TEST(TranslationLength, WorkedValues) {
  MetricGraph g = unit_rose();
  EXPECT_EQ(translation_length(g, Word::parse("ab", 2)), Rational(2));
  EXPECT_EQ(translation_length(g, Word::parse("abA", 2)), Rational(1));
  EXPECT_EQ(translation_length(g, Word::parse("ab", 2).pow(4)), Rational(8));
}

TEST(Axis, GeneratorAndConjugate) {
  MetricGraph g = unit_rose();
  Axis ax = axis_endpoints(g, Word::parse("a", 2));
  EXPECT_EQ(ax.attracting, parse_end(g, "(a)"));
  EXPECT_EQ(ax.repelling, parse_end(g, "(A)"));
  Axis conj = axis_endpoints(g, Word::parse("baB", 2));
  EXPECT_EQ(conj.attracting, parse_end(g, "b:(a)"));
  EXPECT_EQ(conj.repelling, parse_end(g, "b:(A)"));
  EXPECT_THROW(axis_endpoints(g, Word()), Error);
}

TEST(Axis, EndsAreLimitsOfPowers) {
  MetricGraph g = make_rose({Rational(1), Rational(2)});
  for (const Word& w : enumerate_words(2, 3)) {
    if (w.is_identity()) continue;
    Axis ax = axis_endpoints(g, w);
    EdgePath fwd = g.loop_of(w.pow(12));
    EdgePath bwd = g.loop_of(w.pow(-12));
    for (std::size_t i = 0; i < 8; ++i) {
      EXPECT_EQ(ax.attracting.edge_at(i), fwd[i]) << w.str();
      EXPECT_EQ(ax.repelling.edge_at(i), bwd[i]) << w.str();
    }
    EXPECT_EQ(act(g, w, ax.attracting), ax.attracting);
    EXPECT_EQ(act(g, w, ax.repelling), ax.repelling);
    TreePoint gx = act(g, w, root_vertex());
    EXPECT_EQ(busemann(g, ax.attracting, root_vertex(), gx), translation_length(g, w)) << w.str();
  }
  Axis ab = axis_endpoints(make_rose({Rational(1), Rational(1)}), Word::parse("ab", 2));
  MetricGraph u = unit_rose();
  EXPECT_EQ(busemann(u, ab.attracting, root_vertex(), at(u, "ab")), Rational(2));
}

TEST(Shadow, WorkedValues) {
  MetricGraph g = unit_rose();
  EndCylinder c = shadow(g, root_vertex(), at(g, "aa"), ratio(1, 2));
  EXPECT_EQ(c.anchor, root_vertex());
  EXPECT_EQ(c.path, (EdgePath{0, 0}));
  EXPECT_TRUE(shadow(g, root_vertex(), at(g, "aa"), Rational(10)).full_boundary());
}

// Enumerates rays from the root to a fixed depth and decides membership in
// the open r-ball shadow from Dijkstra distances.
TEST(Shadow, RayEnumerationOracle) {
  MetricGraph g = make_rose({Rational(1), Rational(2)});
  const int depth = 6;
  oracle::Unfolding u(g, depth);
  std::vector<EdgePath> rays;
  for (const EdgePath& p : u.nodes())
    if (static_cast<int>(p.size()) == depth) rays.push_back(p);
  std::vector<Rational> radii{ratio(1, 2), Rational(1), ratio(3, 2), Rational(2)};
  for (const EdgePath& y : u.nodes()) {
    if (y.size() > 3) continue;
    auto dy = u.distances_from(y);
    for (const Rational& r : radii) {
      EndCylinder c = shadow(g, root_vertex(), vertex_at(y), r);
      for (const EdgePath& ray : rays) {
        Rational gap = -1;
        for (std::size_t k = 0; k <= ray.size(); ++k) {
          const Rational& d = dy[u.index(EdgePath(ray.begin(), ray.begin() + k))];
          if (gap < 0 || d < gap) gap = d;
        }
        bool expected = gap < r;
        End xi = make_periodic_end(ray, {ray.back()});
        bool got = c.full_boundary() || end_in_half_tree(g, cylinder_half_tree(g, c), xi);
        EXPECT_EQ(got, expected) << "y=" << path_str(g, y) << " r=" << r << " ray=" << path_str(g, ray);
      }
    }
  }
}

TEST(Shadow, BusemannWindowIsTwoR) {
  MetricGraph g = unit_rose();
  Rational r = ratio(3, 2);
  TreePoint y = at(g, "aa");
  End xi = parse_end(g, "a:(b)");
  EndCylinder c = shadow(g, root_vertex(), y, r);
  ASSERT_TRUE(end_in_half_tree(g, cylinder_half_tree(g, c), xi));
  Rational d = tree_distance(g, root_vertex(), y);
  Rational b = busemann(g, xi, root_vertex(), y);
  EXPECT_EQ(b, Rational(0));
  // d - r would be 1/2: the one-radius window does not hold on trees
  EXPECT_LT(b, d - r);
  EXPECT_GE(b, d - 2 * r);
  EXPECT_LE(b, d);
}

TEST(Ends, ParseAndCanonicalForm) {
  MetricGraph g = unit_rose();
  EXPECT_EQ(parse_end(g, "(aa)"), parse_end(g, "(a)"));
  EXPECT_EQ(parse_end(g, "a:(a)"), parse_end(g, "(a)"));
  // the prefix acts as a group element: a . A^n = A^(n-1)
  EXPECT_EQ(parse_end(g, "a:(A)"), parse_end(g, "(A)"));
  EXPECT_EQ(parse_end(g, "ab:(B)"), parse_end(g, "a:(B)"));
  EXPECT_THROW(parse_end(g, "(z)"), Error);
  EXPECT_THROW(parse_end(g, "a:()"), Error);
  End e = parse_end(g, "ab:(a)");
  EXPECT_EQ(e.edge_at(0), 0);
  EXPECT_EQ(e.edge_at(1), 2);
  EXPECT_EQ(e.edge_at(5), 0);
  EXPECT_THROW(make_periodic_end({0}, {1}), Error);
}

TEST(DeckAction, IsometryAndEquivariance) {
  MetricGraph g(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  sample::Engine rng(21);
  for (int i = 0; i < 200; ++i) {
    Word w = sample::word(rng, g.rank(), 0, 4);
    TreePoint x = sample::point(g, rng, 3);
    TreePoint y = sample::point(g, rng, 3);
    End xi = sample::end(g, rng, 3);
    EXPECT_EQ(tree_distance(g, act(g, w, x), act(g, w, y)), tree_distance(g, x, y));
    EXPECT_EQ(busemann(g, act(g, w, xi), act(g, w, x), act(g, w, y)), busemann(g, xi, x, y));
  }
}
