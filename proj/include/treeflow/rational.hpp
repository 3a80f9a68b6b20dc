#pragma once

#include <gmpxx.h>

#include <span>
#include <string>
#include <string_view>

namespace treeflow {

using Rational = mpq_class;

struct ParsedLength {
  Rational value;
  bool decimal = false;  // came from a decimal literal; arithmetic on it is "inexact mode"
};

// Accepts "p/q", integers and decimal literals ("1.6180339887", "2.5e-1").
// Decimal input is stored exactly as the rational it spells.
ParsedLength parse_rational(std::string_view text);

std::string to_string(const Rational& q);
double to_double(const Rational& q);

Rational rational_gcd(const Rational& a, const Rational& b);
Rational rational_gcd(std::span<const Rational> values);

// num/den in lowest terms (mpq_class(num, den) does not reduce).
Rational ratio(long num, long den);

// True iff q is an integer.
bool is_integer(const Rational& q);

}  // namespace treeflow
