#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "treeflow/graph.hpp"
#include "treeflow/rational.hpp"
#include "treeflow/tree.hpp"
#include "treeflow/word.hpp"

namespace treeflow {

// (xi, xi', eta, eta'). On a tree every pair of distinct ends spans a
// geodesic, so validity reduces to distinctness of the four pairs
// (xi, eta), (xi', eta'), (xi, eta'), (xi', eta).
struct Quadruple {
  End xi;
  End xi2;
  End eta;
  End eta2;
};

bool is_valid(const Quadruple& q);
std::string quadruple_str(const MetricGraph& g, const Quadruple& q);

// beta_p(xi, eta) + beta_p(xi', eta') - beta_p(xi, eta') - beta_p(xi', eta).
// Throws DegenerateQuadruple on invalid input.
Rational cross_ratio(const MetricGraph& g, const Quadruple& q, const TreePoint& p);
Rational cross_ratio(const MetricGraph& g, const Quadruple& q);

// [[gamma-, gamma+, gamma xi, xi]]; equals 2 translation_length(gamma).
Rational length_via_crossratio(const MetricGraph& g, const Word& gamma, const End& xi);

struct LengthSequence {
  std::vector<Rational> terms;  // n = 1..n_max
  std::optional<int> stable_from;  // first n of three equal consecutive terms
  Rational limit = 0;              // terms[stable_from - 1] when stable
  Rational cross_ratio = 0;        // [[g1-, g2-, g1+, g2+]]
};

// l(g1^n) + l(g2^n) - l(g1^n g2^n) for n = 1..n_max.
LengthSequence crossratio_from_lengths(const MetricGraph& g, const Word& g1, const Word& g2, int n_max);

// Time shift of the four-step horospherical chain v0 -> v4 built on the
// lines (xi,eta), (xi,eta'), (xi',eta'), (xi',eta), (xi,eta).
Rational twisting_time(const MetricGraph& g, const Quadruple& q);

// Quadruple with cross-ratio 2 d(p, q) for distinct vertices p, q.
Quadruple tree_lengths_quadruple(const MetricGraph& g, const TreePoint& p, const TreePoint& q);

struct ArithmeticityVerdict {
  enum class Kind { Arithmetic, NonArithmetic, ApproximateNonArithmetic };
  Kind kind = Kind::Arithmetic;
  Rational c = 0;            // for Arithmetic
  bool approximate = false;  // decided by the inexact lattice fit
  double residual = 0.0;     // worst |v - n c| of the accepted c

  std::string str() const;
};

struct LatticeFitOptions {
  double c_min = 1e-4;
  double tolerance = 1e-9;
};

// Exact mode: Arithmetic(gcd). Inexact mode: the largest c >= c_min among
// (value or pairwise difference)/k that fits every value within tolerance.
ArithmeticityVerdict arithmeticity(std::span<const Rational> values, bool inexact,
                                   const LatticeFitOptions& opts = {});

// Translation lengths of all cyclically reduced words up to max_len.
std::vector<Rational> length_spectrum_sample(const MetricGraph& g, int max_len);

}  // namespace treeflow
