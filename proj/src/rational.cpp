#include "treeflow/rational.hpp"

#include <cctype>
#include <cstdlib>

#include "treeflow/error.hpp"

namespace treeflow {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::GraphFormat: return "GraphFormat";
    case ErrorCode::ModelConstraint: return "ModelConstraint";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InsufficientDepth: return "InsufficientDepth";
    case ErrorCode::NotHyperbolic: return "NotHyperbolic";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::SubcriticalS: return "SubcriticalS";
    case ErrorCode::DepthTooShallow: return "DepthTooShallow";
    case ErrorCode::DegenerateQuadruple: return "DegenerateQuadruple";
    case ErrorCode::EndOnAxis: return "EndOnAxis";
    case ErrorCode::SharedAxisEnd: return "SharedAxisEnd";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::OverlappingCylinders: return "OverlappingCylinders";
    case ErrorCode::InvalidAction: return "InvalidAction";
    case ErrorCode::InvalidFundDomain: return "InvalidFundDomain";
    case ErrorCode::NonInvariantH: return "NonInvariantH";
    case ErrorCode::NotCommuting: return "NotCommuting";
    case ErrorCode::NotMeasurePreserving: return "NotMeasurePreserving";
  }
  return "Unknown";
}

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  }
  return true;
}

Rational pow10(long e) {
  mpz_class p;
  mpz_ui_pow_ui(p.get_mpz_t(), 10, static_cast<unsigned long>(e < 0 ? -e : e));
  return e < 0 ? Rational(mpz_class(1), p) : Rational(p);
}

}  // namespace

ParsedLength parse_rational(std::string_view text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
  if (text.empty()) throw Error(ErrorCode::GraphFormat, "empty number");

  bool negative = false;
  std::string_view body = text;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  ParsedLength out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) {
      throw Error(ErrorCode::GraphFormat, "malformed fraction '" + std::string(text) + "'");
    }
    mpz_class d{std::string(den)};
    if (d == 0) throw Error(ErrorCode::GraphFormat, "zero denominator in '" + std::string(text) + "'");
    out.value = Rational(mpz_class{std::string(num)}, d);
    out.value.canonicalize();
  } else {
    std::string_view mantissa = body;
    long exponent = 0;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      mantissa = body.substr(0, e);
      std::string exp_text(body.substr(e + 1));
      char* end = nullptr;
      exponent = std::strtol(exp_text.c_str(), &end, 10);
      if (exp_text.empty() || *end != '\0') {
        throw Error(ErrorCode::GraphFormat, "malformed exponent in '" + std::string(text) + "'");
      }
      out.decimal = true;
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
      auto ip = mantissa.substr(0, dot);
      auto fp = mantissa.substr(dot + 1);
      if ((!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)) || (ip.empty() && fp.empty())) {
        throw Error(ErrorCode::GraphFormat, "malformed decimal '" + std::string(text) + "'");
      }
      digits = std::string(ip) + std::string(fp);
      frac_digits = static_cast<long>(fp.size());
      out.decimal = true;
    } else {
      if (!all_digits(mantissa)) throw Error(ErrorCode::GraphFormat, "malformed number '" + std::string(text) + "'");
      digits = std::string(mantissa);
    }
    out.value = Rational(mpz_class(digits)) * pow10(exponent - frac_digits);
    out.value.canonicalize();
  }
  if (negative) out.value = -out.value;
  return out;
}

std::string to_string(const Rational& q) { return q.get_str(); }

double to_double(const Rational& q) { return q.get_d(); }

Rational rational_gcd(const Rational& a, const Rational& b) {
  // gcd(p1/q1, p2/q2) = gcd(p1*q2, p2*q1) / (q1*q2)
  mpz_class num;
  mpz_class x = abs(a.get_num() * b.get_den());
  mpz_class y = abs(b.get_num() * a.get_den());
  mpz_gcd(num.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
  Rational g(num, a.get_den() * b.get_den());
  g.canonicalize();
  return g;
}

Rational rational_gcd(std::span<const Rational> values) {
  Rational g = 0;
  for (const auto& v : values) g = rational_gcd(g, v);
  return g;
}

Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

bool is_integer(const Rational& q) { return q.get_den() == 1; }

}  // namespace treeflow
