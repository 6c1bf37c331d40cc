#pragma once

#include <gmpxx.h>

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <system_error>

#include "rpr/error.hpp"

namespace rpr {

using Integer = mpz_class;
using Rational = mpq_class;

/// Shortest decimal text that round-trips to `x`.
inline std::string shortest_decimal(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

/// Parses a decimal literal such as "-15.91" or "2.5e-3" into an exact rational.
inline Rational parse_decimal(const std::string& text) {
  std::size_t pos = 0;
  bool negative = false;
  if (pos < text.size() && (text[pos] == '-' || text[pos] == '+')) {
    negative = text[pos] == '-';
    ++pos;
  }
  std::string digits;
  long exponent = 0;
  bool seen_point = false;
  for (; pos < text.size(); ++pos) {
    char c = text[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      if (seen_point) --exponent;
    } else if (c == '.' && !seen_point) {
      seen_point = true;
    } else if (c == 'e' || c == 'E') {
      exponent += std::stol(text.substr(pos + 1));
      break;
    } else {
      throw Error("not a decimal literal: " + text);
    }
  }
  if (digits.empty()) throw Error("not a decimal literal: " + text);
  Integer num(digits, 10);
  Integer scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(std::labs(exponent)));
  Rational out = exponent >= 0 ? Rational(num * scale) : Rational(num, scale);
  out.canonicalize();
  return negative ? Rational(-out) : out;
}

/// Exact rational equal to the shortest decimal representation of `x`
/// (15.91 becomes 1591/100 rather than the binary expansion of the double).
inline Rational decimal_rational(double x) {
  if (!std::isfinite(x)) throw Error("non-finite value cannot be made exact");
  return parse_decimal(shortest_decimal(x));
}

/// Exact rational equal to the binary value of `x`.
inline Rational exact_rational(double x) {
  Rational r(x);
  r.canonicalize();
  return r;
}

inline double to_double(const Rational& q) { return q.get_d(); }

/// Correctly rounded enough for evaluation: uses mpf for wide operands.
inline long double to_long_double(const Rational& q) {
  mpf_class f(q, 128);
  long exp = 0;
  double mant = mpf_get_d_2exp(&exp, f.get_mpf_t());
  mpf_class rest = f - mpf_class(std::ldexp(mant, static_cast<int>(exp)), 128);
  return static_cast<long double>(std::ldexp(mant, static_cast<int>(exp))) + static_cast<long double>(rest.get_d());
}

/// Rational approximation of sqrt(q) with `digits` significant decimal digits;
/// exact when q is the square of a rational.
inline Rational sqrt_rational(const Rational& q, int digits) {
  if (q < 0) throw Error("square root of a negative rational");
  if (q == 0) return Rational(0);
  Integer rn, rd;
  if (mpz_perfect_square_p(q.get_num_mpz_t()) && mpz_perfect_square_p(q.get_den_mpz_t())) {
    mpz_sqrt(rn.get_mpz_t(), q.get_num_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), q.get_den_mpz_t());
    return Rational(rn, rd);
  }
  // floor(sqrt(q * 10^(2k))) / 10^k with k chosen for `digits` significant digits.
  double approx = std::sqrt(q.get_d());
  long magnitude = static_cast<long>(std::floor(std::log10(approx)));
  long k = digits - 1 - magnitude;
  if (k < 0) k = 0;
  Integer pow10;
  mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(k));
  Integer scaled_num = q.get_num() * pow10 * pow10;
  Integer quotient = scaled_num / q.get_den();
  Integer root;
  mpz_sqrt(root.get_mpz_t(), quotient.get_mpz_t());
  // round to nearest: compare (root + 1/2)^2 with the scaled value
  Rational half_up = Rational(2 * root + 1, 2);
  if (half_up * half_up * q.get_den() < Rational(scaled_num)) root += 1;
  Rational out(root, pow10);
  out.canonicalize();
  return out;
}

inline int sign(const Rational& q) { return sgn(q); }
inline int sign(const Integer& z) { return sgn(z); }

}  // namespace rpr
