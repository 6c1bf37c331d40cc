#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "rpr/unipoly.hpp"

namespace rpr {

/// A real root isolated in [lower, upper]; lower == upper for a root found
/// exactly at a dyadic point.
struct RealRoot {
  Rational lower;
  Rational upper;
  double value = 0.0;
  int multiplicity = 1;
};

struct Interval {
  double lo;
  double hi;
};

namespace detail {

inline int sign_variations(const std::vector<Integer>& c) {
  int count = 0, last = 0;
  for (const auto& v : c) {
    int s = sgn(v);
    if (s == 0) continue;
    if (last != 0 && s != last) ++count;
    last = s;
  }
  return count;
}

/// p(x) -> p(x + 1), in place.
inline void taylor_shift_one(std::vector<Integer>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = n - 1; j > i; --j) a[j - 1] += a[j];
}

/// Descartes bound for roots of p in (0, 1): sign variations of
/// (x + 1)^n p(1 / (x + 1)).
inline int descartes_unit(const std::vector<Integer>& p) {
  std::vector<Integer> r(p.rbegin(), p.rend());
  taylor_shift_one(r);
  return sign_variations(r);
}

/// 2^n p(x / 2)
inline std::vector<Integer> halve_argument(const std::vector<Integer>& p) {
  const std::size_t n = p.size() - 1;
  std::vector<Integer> out(p.size());
  for (std::size_t i = 0; i <= n; ++i) mpz_mul_2exp(out[i].get_mpz_t(), p[i].get_mpz_t(), n - i);
  return out;
}

inline Integer sum_of(const std::vector<Integer>& p) {
  Integer s = 0;
  for (const auto& v : p) s += v;
  return s;
}

/// Sign of p(num / 2^exp) for an integer polynomial p.
inline int sign_at_dyadic(const ZPoly& p, const Integer& num, unsigned long exp) {
  const auto& c = p.coefficients();
  if (c.empty()) return 0;
  Integer acc = c.back();
  Integer scaled;
  const std::size_t n = c.size() - 1;
  for (std::size_t k = n; k-- > 0;) {
    acc *= num;
    mpz_mul_2exp(scaled.get_mpz_t(), c[k].get_mpz_t(), exp * (n - k));
    acc += scaled;
  }
  return sgn(acc);
}

inline int sign_at(const ZPoly& p, const Rational& x) {
  // Dyadic fast path; general rationals use the homogenized form.
  const Integer& den = x.get_den();
  if (mpz_popcount(den.get_mpz_t()) == 1) {
    unsigned long e = mpz_scan1(den.get_mpz_t(), 0);
    return sign_at_dyadic(p, x.get_num(), e);
  }
  const auto& c = p.coefficients();
  if (c.empty()) return 0;
  Integer acc = c.back(), pw = 1;
  for (std::size_t k = c.size() - 1; k-- > 0;) {
    pw *= den;
    acc = acc * x.get_num() + c[k] * pw;
  }
  return sgn(acc);
}

/// Isolating intervals (scaled by 2^-scale_bits) for the roots of a
/// square-free integer polynomial inside (0, 2^scale_bits).
inline void isolate_positive(const ZPoly& f, std::vector<std::pair<Rational, Rational>>& out) {
  if (f.degree() <= 0) return;
  const auto& a = f.coefficients();
  // Cauchy bound 1 + max|a_i| / |a_n|, rounded up to a power of two.
  std::size_t maxbits = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) maxbits = std::max(maxbits, mpz_sizeinbase(a[i].get_mpz_t(), 2));
  const long lead_bits = static_cast<long>(mpz_sizeinbase(a.back().get_mpz_t(), 2));
  long k = std::max<long>(static_cast<long>(maxbits) - lead_bits + 2, 1);
  // g(x) = f(2^k x)
  std::vector<Integer> g(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) mpz_mul_2exp(g[i].get_mpz_t(), a[i].get_mpz_t(), static_cast<unsigned long>(k) * i);

  struct Node {
    std::vector<Integer> p;
    Integer c;
    unsigned long depth;
  };
  std::vector<Node> stack;
  stack.push_back({std::move(g), Integer(0), 0});
  auto to_rational = [k](const Integer& c, unsigned long depth) {
    Rational x(c);
    if (k >= static_cast<long>(depth))
      mpq_mul_2exp(x.get_mpq_t(), x.get_mpq_t(), static_cast<unsigned long>(k) - depth);
    else
      mpq_div_2exp(x.get_mpq_t(), x.get_mpq_t(), depth - static_cast<unsigned long>(k));
    return x;
  };
  while (!stack.empty()) {
    Node node = std::move(stack.back());
    stack.pop_back();
    int v = descartes_unit(node.p);
    if (v == 0) continue;
    if (v == 1 && node.p.front() != 0 && sum_of(node.p) != 0) {
      out.emplace_back(to_rational(node.c, node.depth), to_rational(node.c + 1, node.depth));
      continue;
    }
    std::vector<Integer> left = halve_argument(node.p);
    // root exactly at the midpoint
    if (sum_of(left) == 0) {
      Rational mid = to_rational(2 * node.c + 1, node.depth + 1);
      out.emplace_back(mid, mid);
    }
    std::vector<Integer> right = left;
    taylor_shift_one(right);
    stack.push_back({std::move(right), 2 * node.c + 1, node.depth + 1});
    stack.push_back({std::move(left), 2 * node.c, node.depth + 1});
  }
}

/// Isolating intervals of all nonzero real roots of a square-free integer
/// polynomial with f(0) != 0.
inline std::vector<std::pair<Rational, Rational>> isolate_square_free(const ZPoly& f) {
  std::vector<std::pair<Rational, Rational>> out;
  if (f.degree() <= 0) return out;
  isolate_positive(f, out);
  std::vector<std::pair<Rational, Rational>> neg;
  isolate_positive(f.reflected(), neg);
  for (auto& [lo, hi] : neg) out.emplace_back(Rational(-hi), Rational(-lo));
  return out;
}

/// Removes the factor x from a square-free polynomial; reports whether it was there.
inline bool deflate_zero(ZPoly& f) {
  if (f.degree() <= 0 || f.coeff(0) != 0) return false;
  std::vector<Integer> c(f.coefficients().begin() + 1, f.coefficients().end());
  f = ZPoly(std::move(c));
  return true;
}

/// Shrinks [lo, hi] around the single root of f by bisection on exact signs
/// until the width is at most rel * min(|lo|, |hi|). The interval must not
/// contain zero in its interior and f must not vanish at its endpoints.
inline void refine(const ZPoly& f, Rational& lo, Rational& hi, double rel) {
  if (lo == hi) return;
  const int slo = sign_at(f, lo);
  const Rational rel_q = exact_rational(rel);
  for (int iter = 0; iter < 4000; ++iter) {
    Rational mag = std::min(abs(lo), abs(hi));
    if (mag > 0 && hi - lo <= rel_q * mag) return;
    Rational mid = (lo + hi) / 2;
    int sm = sign_at(f, mid);
    if (sm == 0) {
      lo = hi = mid;
      return;
    }
    if (sm == slo)
      lo = mid;
    else
      hi = mid;
  }
}

}  // namespace detail

/// All distinct real roots of q (optionally restricted to a closed domain),
/// sorted ascending. Multiplicities come from the square-free decomposition;
/// each root is isolated by Descartes bisection on its square-free factor and
/// refined by exact-sign bisection to relative width <= rel_width.
inline std::vector<RealRoot> real_roots(const QPoly& q, std::optional<Interval> domain = std::nullopt,
                                        double rel_width = 1e-13) {
  if (q.is_zero()) throw PolynomialError("real roots of the zero polynomial");
  std::vector<RealRoot> roots;
  ZPoly z = to_primitive_integer(q);
  if (z.degree() <= 0) return roots;
  auto factors = square_free_decomposition(z);
  for (std::size_t i = 0; i < factors.size(); ++i) {
    ZPoly f = factors[i];
    const int mult = static_cast<int>(i) + 1;
    if (f.degree() <= 0) continue;
    if (detail::deflate_zero(f) && (!domain || (domain->lo <= 0.0 && 0.0 <= domain->hi)))
      roots.push_back(RealRoot{Rational(0), Rational(0), 0.0, mult});
    for (auto [lo, hi] : detail::isolate_square_free(f)) {
      if (domain && (hi.get_d() < domain->lo || lo.get_d() > domain->hi)) continue;
      detail::refine(f, lo, hi, rel_width);
      Rational mid = (lo + hi) / 2;
      double value = mid.get_d();
      if (domain && (value < domain->lo || value > domain->hi)) continue;
      roots.push_back(RealRoot{lo, hi, value, mult});
    }
  }
  std::sort(roots.begin(), roots.end(), [](const RealRoot& a, const RealRoot& b) { return a.lower < b.lower; });
  return roots;
}

/// Number of distinct real roots (no refinement).
inline int count_real_roots(const ZPoly& p) {
  if (p.is_zero()) throw PolynomialError("real roots of the zero polynomial");
  ZPoly z = square_free_part(p);
  if (z.degree() <= 0) return 0;
  int zero = detail::deflate_zero(z) ? 1 : 0;
  return zero + static_cast<int>(detail::isolate_square_free(z).size());
}

inline int count_real_roots(const QPoly& q) {
  if (q.is_zero()) throw PolynomialError("real roots of the zero polynomial");
  return count_real_roots(to_primitive_integer(q));
}

}  // namespace rpr
