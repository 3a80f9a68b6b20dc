#include <gtest/gtest.h>

#include "support.hpp"
#include "treeflow/crossratio.hpp"
#include "treeflow/error.hpp"
#include "treeflow/sampling.hpp"

using namespace treeflow;

namespace {

MetricGraph unit_rose() { return make_rose({Rational(1), Rational(1)}); }

Quadruple quad(const MetricGraph& g, const char* a, const char* b, const char* c, const char* d) {
  return {parse_end(g, a), parse_end(g, b), parse_end(g, c), parse_end(g, d)};
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no treeflow::Error thrown";
  return ErrorCode::InvalidArgument;
}

Quadruple random_quad(const MetricGraph& g, sample::Engine& rng) {
  while (true) {
    Quadruple q{sample::end(g, rng, 2), sample::end(g, rng, 2), sample::end(g, rng, 2), sample::end(g, rng, 2)};
    if (is_valid(q)) return q;
  }
}

}  // namespace

TEST(CrossRatio, WorkedValues) {
  MetricGraph g = unit_rose();
  Quadruple two = quad(g, "(b)", "a:(b)", "(a)", "(B)");
  EXPECT_EQ(cross_ratio(g, two), Rational(2));
  EXPECT_EQ(cross_ratio(g, {two.xi, two.xi2, two.eta2, two.eta}), Rational(-2));
  EXPECT_EQ(cross_ratio(g, quad(g, "(A)", "(B)", "(a)", "(b)")), Rational(0));
}

TEST(CrossRatio, MatchesBruteForceBetas) {
  MetricGraph g = make_rose({1, 2});
  const int depth = 7;
  oracle::Unfolding u(g, depth);
  sample::Engine rng(17);
  for (int i = 0; i < 25; ++i) {
    Quadruple q = random_quad(g, rng);
    auto b = [&](const End& x, const End& y) { return oracle::brute_beta(u, depth, depth, {}, x, y); };
    Rational want = b(q.xi, q.eta) + b(q.xi2, q.eta2) - b(q.xi, q.eta2) - b(q.xi2, q.eta);
    EXPECT_EQ(cross_ratio(g, q, root_vertex()), want) << quadruple_str(g, q);
  }
}

TEST(CrossRatio, Identities) {
  MetricGraph g(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  sample::Engine rng(4);
  for (int i = 0; i < 300; ++i) {
    Quadruple q = random_quad(g, rng);
    Rational v = cross_ratio(g, q);
    Word w = sample::word(rng, g.rank(), 1, 4);
    Quadruple moved{act(g, w, q.xi), act(g, w, q.xi2), act(g, w, q.eta), act(g, w, q.eta2)};
    EXPECT_EQ(cross_ratio(g, moved), v);
    EXPECT_EQ(cross_ratio(g, {q.xi, q.xi2, q.eta2, q.eta}), -v);
    EXPECT_EQ(cross_ratio(g, {q.eta, q.eta2, q.xi, q.xi2}), v);
    End eta3 = sample::end(g, rng, 2);
    Quadruple q1{q.xi, q.xi2, q.eta2, eta3};
    Quadruple q2{q.xi, q.xi2, q.eta, eta3};
    if (is_valid(q1) && is_valid(q2)) EXPECT_EQ(v + cross_ratio(g, q1), cross_ratio(g, q2));
    Quadruple t2{q.xi2, q.eta, q.xi, q.eta2};
    Quadruple t3{q.eta, q.xi, q.xi2, q.eta2};
    if (is_valid(t2) && is_valid(t3)) EXPECT_EQ(v + cross_ratio(g, t2) + cross_ratio(g, t3), Rational(0));
    TreePoint p = sample::point(g, rng, 3);
    EXPECT_EQ(cross_ratio(g, q, p), v);
  }
}

TEST(CrossRatio, Degenerate) {
  MetricGraph g = unit_rose();
  Quadruple q = quad(g, "(a)", "(b)", "(a)", "(B)");
  EXPECT_FALSE(is_valid(q));
  EXPECT_EQ(code_of([&] { cross_ratio(g, q); }), ErrorCode::DegenerateQuadruple);
  EXPECT_EQ(code_of([&] { twisting_time(g, q); }), ErrorCode::DegenerateQuadruple);
}

TEST(LengthViaCrossRatio, WorkedValues) {
  MetricGraph g = unit_rose();
  EXPECT_EQ(length_via_crossratio(g, Word::parse("a", 2), parse_end(g, "(b)")), Rational(2));
  EXPECT_EQ(length_via_crossratio(g, Word::parse("ab", 2), parse_end(g, "B:(A)")), Rational(4));
  MetricGraph h = make_rose({1, 2});
  EXPECT_EQ(length_via_crossratio(h, Word::parse("b", 2), parse_end(h, "(a)")), Rational(4));
}

TEST(LengthViaCrossRatio, RandomWords) {
  MetricGraph g = make_rose({1, 2});
  sample::Engine rng(9);
  int done = 0;
  while (done < 100) {
    Word w = sample::word(rng, 2, 1, 8);
    End xi = sample::end(g, rng, 3);
    Axis ax = axis_endpoints(g, w);
    if (xi == ax.attracting || xi == ax.repelling) continue;
    EXPECT_EQ(length_via_crossratio(g, w, xi), 2 * translation_length(g, w)) << w.str();
    ++done;
  }
}

TEST(LengthViaCrossRatio, Errors) {
  MetricGraph g = unit_rose();
  EXPECT_EQ(code_of([&] { length_via_crossratio(g, Word::parse("a", 2), parse_end(g, "(a)")); }),
            ErrorCode::EndOnAxis);
  EXPECT_EQ(code_of([&] { length_via_crossratio(g, Word(), parse_end(g, "(a)")); }), ErrorCode::NotHyperbolic);
}

TEST(CrossRatioFromLengths, WorkedValues) {
  MetricGraph g = unit_rose();
  LengthSequence conj = crossratio_from_lengths(g, Word::parse("a", 2), Word::parse("baB", 2), 6);
  for (const Rational& t : conj.terms) EXPECT_EQ(t, Rational(-2));
  ASSERT_TRUE(conj.stable_from.has_value());
  EXPECT_EQ(conj.limit, Rational(-2));
  EXPECT_EQ(conj.cross_ratio, Rational(-2));
  EXPECT_EQ(cross_ratio(g, quad(g, "(A)", "b:(A)", "(a)", "b:(a)")), Rational(-2));
  LengthSequence free = crossratio_from_lengths(g, Word::parse("a", 2), Word::parse("b", 2), 5);
  for (const Rational& t : free.terms) EXPECT_EQ(t, Rational(0));
  LengthSequence one = crossratio_from_lengths(g, Word::parse("a", 2), Word::parse("b", 2), 1);
  EXPECT_EQ(one.terms, std::vector<Rational>{Rational(0)});
}

TEST(CrossRatioFromLengths, LimitIsCrossRatio) {
  MetricGraph g = make_rose({1, 2});
  sample::Engine rng(12);
  int done = 0;
  while (done < 40) {
    Word g1 = sample::word(rng, 2, 1, 4);
    Word g2 = sample::word(rng, 2, 1, 4);
    Axis a1 = axis_endpoints(g, g1);
    Axis a2 = axis_endpoints(g, g2);
    if (a1.attracting == a2.attracting || a1.attracting == a2.repelling || a1.repelling == a2.attracting ||
        a1.repelling == a2.repelling)
      continue;
    LengthSequence s = crossratio_from_lengths(g, g1, g2, 12);
    ASSERT_TRUE(s.stable_from.has_value()) << g1.str() << " " << g2.str();
    EXPECT_EQ(s.limit, s.cross_ratio);
    EXPECT_EQ(s.cross_ratio, cross_ratio(g, {a1.repelling, a2.repelling, a1.attracting, a2.attracting}));
    ++done;
  }
  EXPECT_EQ(code_of([&] { crossratio_from_lengths(g, Word::parse("a", 2), Word::parse("aa", 2), 3); }),
            ErrorCode::SharedAxisEnd);
}

TEST(Twisting, WorkedValuesAndRandom) {
  MetricGraph g = unit_rose();
  Quadruple two = quad(g, "(b)", "a:(b)", "(a)", "(B)");
  EXPECT_EQ(twisting_time(g, two), Rational(2));
  EXPECT_EQ(twisting_time(g, {two.xi, two.xi2, two.eta2, two.eta}), Rational(-2));
  EXPECT_EQ(twisting_time(g, quad(g, "(A)", "(B)", "(a)", "(b)")), Rational(0));
  MetricGraph t(2, {{0, 1, 1}, {0, 1, ratio(1, 2)}, {0, 1, ratio(3, 2)}});
  sample::Engine rng(30);
  for (int i = 0; i < 100; ++i) {
    Quadruple q = random_quad(t, rng);
    EXPECT_EQ(twisting_time(t, q), cross_ratio(t, q)) << quadruple_str(t, q);
  }
}

TEST(TreeLengths, QuadrupleRealizesTwiceDistance) {
  MetricGraph g = make_rose({1, 2});
  sample::Engine rng(2);
  for (int i = 0; i < 100; ++i) {
    TreePoint p = sample::vertex(g, rng, 3);
    TreePoint q = sample::vertex(g, rng, 3);
    if (p == q) continue;
    Quadruple quadr = tree_lengths_quadruple(g, p, q);
    ASSERT_TRUE(is_valid(quadr));
    EXPECT_EQ(cross_ratio(g, quadr), 2 * tree_distance(g, p, q));
  }
}

TEST(BetaTranslate, CorrectionTerm) {
  MetricGraph g = make_rose({1, 2});
  sample::Engine rng(6);
  for (int i = 0; i < 200; ++i) {
    End xi = sample::end(g, rng, 2);
    End eta = sample::end(g, rng, 2);
    if (xi == eta) continue;
    Word w = sample::word(rng, 2, 0, 4);
    TreePoint x = sample::vertex(g, rng, 2);
    TreePoint back = act(g, w.inverse(), x);
    Rational lhs = *beta(g, x, act(g, w, xi), act(g, w, eta));
    Rational rhs = *beta(g, x, xi, eta) + busemann(g, xi, x, back) + busemann(g, eta, x, back);
    EXPECT_EQ(lhs, rhs);
  }
}

TEST(Arithmeticity, ExactAndInexact) {
  using K = ArithmeticityVerdict::Kind;
  std::vector<Rational> ones{1, 1};
  auto v = arithmeticity(ones, false);
  EXPECT_EQ(v.kind, K::Arithmetic);
  EXPECT_EQ(v.c, Rational(1));
  std::vector<Rational> two_three{2, 3};
  EXPECT_EQ(arithmeticity(two_three, false).c, Rational(1));
  std::vector<Rational> halves{1, ratio(3, 2)};
  EXPECT_EQ(arithmeticity(halves, false).c, ratio(1, 2));
  std::vector<Rational> golden{Rational(1), parse_rational("1.6180339887").value};
  EXPECT_EQ(arithmeticity(golden, true).kind, K::ApproximateNonArithmetic);
  std::vector<Rational> tidy{Rational(1), parse_rational("2.5").value};
  auto t = arithmeticity(tidy, true);
  EXPECT_EQ(t.kind, K::Arithmetic);
  EXPECT_TRUE(t.approximate);
  EXPECT_EQ(t.c, ratio(1, 2));
  std::vector<Rational> none;
  EXPECT_EQ(code_of([&] { arithmeticity(none, false); }), ErrorCode::EmptyInput);
}

TEST(Arithmeticity, LengthSpectrum) {
  auto spec = length_spectrum_sample(make_rose({1, ratio(3, 2)}), 4);
  EXPECT_EQ(arithmeticity(spec, false).c, ratio(1, 2));
  spec = length_spectrum_sample(make_rose({2, 3}), 4);
  EXPECT_EQ(arithmeticity(spec, false).c, Rational(1));
}
