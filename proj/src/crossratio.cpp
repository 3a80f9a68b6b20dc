#include "treeflow/crossratio.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "treeflow/error.hpp"

namespace treeflow {

bool is_valid(const Quadruple& q) {
  return !(q.xi == q.eta) && !(q.xi2 == q.eta2) && !(q.xi == q.eta2) && !(q.xi2 == q.eta);
}

std::string quadruple_str(const MetricGraph& g, const Quadruple& q) {
  return "[[" + end_str(g, q.xi) + ", " + end_str(g, q.xi2) + ", " + end_str(g, q.eta) + ", " + end_str(g, q.eta2) +
         "]]";
}

namespace {

Rational finite_beta(const MetricGraph& g, const TreePoint& p, const End& a, const End& b) {
  auto v = beta(g, p, a, b);
  if (!v) throw Error(ErrorCode::DegenerateQuadruple, "coinciding ends in cross-ratio");
  return *v;
}

Rational cross_ratio_at(const MetricGraph& g, const Quadruple& q, const TreePoint& p) {
  return finite_beta(g, p, q.xi, q.eta) + finite_beta(g, p, q.xi2, q.eta2) - finite_beta(g, p, q.xi, q.eta2) -
         finite_beta(g, p, q.xi2, q.eta);
}

}  // namespace

Rational cross_ratio(const MetricGraph& g, const Quadruple& q, const TreePoint& p) {
  if (!is_valid(q)) throw Error(ErrorCode::DegenerateQuadruple, quadruple_str(g, q));
  Rational value = cross_ratio_at(g, q, p);
#ifndef NDEBUG
  if (value != cross_ratio_at(g, q, root_vertex())) {
    throw Error(ErrorCode::InvalidArgument, "cross-ratio depends on basepoint: " + quadruple_str(g, q));
  }
#endif
  return value;
}

Rational cross_ratio(const MetricGraph& g, const Quadruple& q) { return cross_ratio(g, q, root_vertex()); }

Rational length_via_crossratio(const MetricGraph& g, const Word& gamma, const End& xi) {
  Axis ax = axis_endpoints(g, gamma);
  if (xi == ax.repelling || xi == ax.attracting) {
    throw Error(ErrorCode::EndOnAxis, end_str(g, xi) + " is fixed by " + gamma.str());
  }
  return cross_ratio(g, Quadruple{ax.repelling, ax.attracting, act(g, gamma, xi), xi});
}

LengthSequence crossratio_from_lengths(const MetricGraph& g, const Word& g1, const Word& g2, int n_max) {
  Axis a1 = axis_endpoints(g, g1);
  Axis a2 = axis_endpoints(g, g2);
  std::vector<End> ends{a1.repelling, a1.attracting, a2.repelling, a2.attracting};
  for (std::size_t i = 0; i < ends.size(); ++i) {
    for (std::size_t j = i + 1; j < ends.size(); ++j) {
      if (ends[i] == ends[j]) throw Error(ErrorCode::SharedAxisEnd, g1.str() + " and " + g2.str());
    }
  }
  LengthSequence out;
  out.cross_ratio = cross_ratio(g, Quadruple{a1.repelling, a2.repelling, a1.attracting, a2.attracting});
  for (int n = 1; n <= n_max; ++n) {
    Word p1 = g1.pow(n);
    Word p2 = g2.pow(n);
    out.terms.push_back(translation_length(g, p1) + translation_length(g, p2) - translation_length(g, p1 * p2));
    std::size_t k = out.terms.size();
    if (!out.stable_from && k >= 3 && out.terms[k - 1] == out.terms[k - 2] && out.terms[k - 2] == out.terms[k - 3]) {
      out.stable_from = static_cast<int>(k) - 2;
      out.limit = out.terms[k - 1];
    }
  }
  return out;
}

Rational twisting_time(const MetricGraph& g, const Quadruple& q) {
  if (!is_valid(q)) throw Error(ErrorCode::DegenerateQuadruple, quadruple_str(g, q));
  GeodesicLine l0(g, q.xi, q.eta);
  GeodesicLine l1(g, q.xi, q.eta2);
  GeodesicLine l2(g, q.xi2, q.eta2);
  GeodesicLine l3(g, q.xi2, q.eta);

  TreePoint v0 = l0.at(0);
  TreePoint v1 = l1.at(l1.time_on_from_horosphere(v0));  // same xi-horosphere
  TreePoint v2 = l2.at(l2.time_on_to_horosphere(v1));    // same eta'-horosphere
  TreePoint v3 = l3.at(l3.time_on_from_horosphere(v2));  // same xi'-horosphere
  TreePoint v4 = l0.at(l0.time_on_to_horosphere(v3));    // same eta-horosphere
  return busemann(g, q.eta, v0, v4);
}

Quadruple tree_lengths_quadruple(const MetricGraph& g, const TreePoint& p, const TreePoint& q) {
  if (!p.is_vertex() || !q.is_vertex() || p == q) {
    throw Error(ErrorCode::InvalidArgument, "need two distinct vertices");
  }
  auto path = geodesic_edges(g, p, q);
  int toward_q = path.front().edge;
  int toward_p = reverse_edge(path.back().edge);
  auto others = [&](const TreePoint& v, int avoid) {
    std::vector<int> out;
    for (int f : g.out_edges(quotient_vertex(g, v))) {
      if (f != avoid) out.push_back(f);
    }
    return out;
  };
  auto at_p = others(p, toward_q);
  auto at_q = others(q, toward_p);
  if (at_p.size() < 2 || at_q.size() < 2) throw Error(ErrorCode::ModelConstraint, "vertex of valence < 3");
  // v runs p -> q, w runs q -> p; the six germs at p and q are distinct.
  End v_minus = end_in_direction(g, p, at_p[0]);
  End w_plus = end_in_direction(g, p, at_p[1]);
  End v_plus = end_in_direction(g, q, at_q[0]);
  End w_minus = end_in_direction(g, q, at_q[1]);
  return Quadruple{v_minus, w_minus, v_plus, w_plus};
}

std::string ArithmeticityVerdict::str() const {
  switch (kind) {
    case Kind::Arithmetic:
      return std::string(approximate ? "Arithmetic~" : "Arithmetic") + "(c=" + to_string(c) + ")";
    case Kind::NonArithmetic:
      return "NonArithmetic";
    case Kind::ApproximateNonArithmetic:
      return "ApproximateNonArithmetic";
  }
  return "?";
}

ArithmeticityVerdict arithmeticity(std::span<const Rational> values, bool inexact, const LatticeFitOptions& opts) {
  if (values.empty()) throw Error(ErrorCode::EmptyInput, "arithmeticity of an empty set");
  std::vector<Rational> mags;
  for (const auto& v : values) {
    if (v != 0) mags.push_back(abs(v));
  }
  if (mags.empty()) throw Error(ErrorCode::EmptyInput, "all values are zero");

  ArithmeticityVerdict out;
  if (!inexact) {
    out.c = rational_gcd(mags);
    return out;
  }

  std::set<Rational> bases(mags.begin(), mags.end());
  std::size_t limit = std::min<std::size_t>(mags.size(), 8);
  for (std::size_t i = 0; i < limit; ++i) {
    for (std::size_t j = i + 1; j < limit; ++j) {
      Rational d = abs(mags[i] - mags[j]);
      if (to_double(d) > opts.tolerance) bases.insert(d);
    }
  }
  std::vector<double> vd;
  for (const auto& v : mags) vd.push_back(to_double(v));

  bool found = false;
  for (const auto& base : bases) {
    double bd = to_double(base);
    for (long k = 1; bd / static_cast<double>(k) >= opts.c_min; ++k) {
      double c = bd / static_cast<double>(k);
      if (found && c <= to_double(out.c)) break;
      double worst = 0.0;
      for (double v : vd) worst = std::max(worst, std::abs(v - std::round(v / c) * c));
      if (worst <= opts.tolerance) {
        found = true;
        out.c = base / k;
        out.residual = worst;
        break;
      }
    }
  }
  out.approximate = true;
  if (!found) {
    out.kind = ArithmeticityVerdict::Kind::ApproximateNonArithmetic;
    out.c = 0;
  }
  return out;
}

std::vector<Rational> length_spectrum_sample(const MetricGraph& g, int max_len) {
  std::vector<Rational> out;
  for (const Word& w : enumerate_words(g.rank(), max_len)) {
    if (w.is_identity() || !(w.cyclic_reduction() == w)) continue;
    out.push_back(translation_length(g, w));
  }
  return out;
}

}  // namespace treeflow
