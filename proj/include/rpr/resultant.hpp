#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "rpr/bipoly.hpp"
#include "rpr/parallel.hpp"

namespace rpr {

/// The two inputs share a factor of positive degree in the eliminated
/// variable, so their resultant vanishes identically.
class CommonFactor : public PolynomialError {
 public:
  using PolynomialError::PolynomialError;
};

enum class DeterminantMethod {
  kEvaluationInterpolation,  ///< integer determinants at sample points, exact interpolation
  kFractionFree,             ///< Bareiss elimination with polynomial entries
};

struct ResultantOptions {
  DeterminantMethod method = DeterminantMethod::kEvaluationInterpolation;
  unsigned workers = 1;
};

/// Sylvester matrix of a (degree m in the main variable) and b (degree n):
/// n shifted copies of a's coefficients, then m shifted copies of b's, each
/// row listed from the leading coefficient down.
template <class E>
std::vector<std::vector<E>> sylvester_matrix(const std::vector<E>& a, const std::vector<E>& b, const E& zero = E()) {
  const int m = static_cast<int>(a.size()) - 1;
  const int n = static_cast<int>(b.size()) - 1;
  const int size = m + n;
  std::vector<std::vector<E>> s(static_cast<std::size_t>(size), std::vector<E>(static_cast<std::size_t>(size), zero));
  for (int r = 0; r < n; ++r)
    for (int k = 0; k <= m; ++k) s[static_cast<std::size_t>(r)][static_cast<std::size_t>(r + k)] = a[static_cast<std::size_t>(m - k)];
  for (int r = 0; r < m; ++r)
    for (int k = 0; k <= n; ++k) s[static_cast<std::size_t>(n + r)][static_cast<std::size_t>(r + k)] = b[static_cast<std::size_t>(n - k)];
  return s;
}

/// Fraction-free Gaussian elimination (Bareiss). E must support exact
/// division of the Sylvester-identity quotients through `divide`.
template <class E, class Divide>
E bareiss_determinant(std::vector<std::vector<E>> m, const E& zero, const E& one, Divide divide) {
  const std::size_t n = m.size();
  if (n == 0) return one;
  E previous = one;
  bool negate = false;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m[k][k] == zero) {
      std::size_t swap_row = k + 1;
      while (swap_row < n && m[swap_row][k] == zero) ++swap_row;
      if (swap_row == n) return zero;
      std::swap(m[k], m[swap_row]);
      negate = !negate;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        E v = m[i][j] * m[k][k] - m[i][k] * m[k][j];
        m[i][j] = divide(v, previous);
      }
      m[i][k] = zero;
    }
    previous = m[k][k];
  }
  E det = m[n - 1][n - 1];
  if (negate) det = zero - det;
  return det;
}

inline Integer integer_determinant(std::vector<std::vector<Integer>> m) {
  return bareiss_determinant(std::move(m), Integer(0), Integer(1), [](const Integer& v, const Integer& d) {
    Integer q;
    mpz_divexact(q.get_mpz_t(), v.get_mpz_t(), d.get_mpz_t());
    return q;
  });
}

/// Exact polynomial interpolation through (x_k, y_k) by Newton divided differences.
inline QPoly interpolate(const std::vector<Integer>& xs, std::vector<Rational> ys) {
  const std::size_t n = xs.size();
  for (std::size_t level = 1; level < n; ++level)
    for (std::size_t i = n - 1; i >= level; --i) {
      ys[i] = (ys[i] - ys[i - 1]) / Rational(xs[i] - xs[i - level]);
      if (i == level) break;
    }
  QPoly p;
  for (std::size_t i = n; i-- > 0;) {
    p = p * QPoly{Rational(-xs[i]), Rational(1)} + QPoly::constant(ys[i]);
  }
  return p;
}

namespace detail {

inline ZPoly resultant_fraction_free(const ZBiPoly& a, const ZBiPoly& b) {
  auto s = sylvester_matrix(a.rows(), b.rows());
  return bareiss_determinant(std::move(s), ZPoly(), ZPoly::constant(Integer(1)), [](const ZPoly& v, const ZPoly& d) { return exact_quotient(v, d); });
}

inline ZPoly resultant_evaluation(const ZBiPoly& a, const ZBiPoly& b, unsigned workers) {
  const int m = a.deg_t(), n = b.deg_t();
  const int bound = n * std::max(a.deg_t1(), 0) + m * std::max(b.deg_t1(), 0);
  const std::size_t count = static_cast<std::size_t>(bound) + 1;
  std::vector<Integer> xs(count);
  for (std::size_t k = 0; k < count; ++k) xs[k] = static_cast<long>(k) - bound / 2;
  std::vector<Rational> ys(count);
  parallel_for(count, workers, [&](std::size_t k) {
    std::vector<Integer> av, bv;
    av.reserve(a.rows().size());
    bv.reserve(b.rows().size());
    for (const auto& r : a.rows()) av.push_back(r.eval(xs[k]));
    for (const auto& r : b.rows()) bv.push_back(r.eval(xs[k]));
    ys[k] = Rational(integer_determinant(sylvester_matrix(av, bv)));
  });
  QPoly q = interpolate(xs, std::move(ys));
  std::vector<Integer> c;
  c.reserve(q.coefficients().size());
  for (const auto& v : q.coefficients()) {
    if (v.get_den() != 1) throw PolynomialError("non-integral interpolated resultant");
    c.push_back(v.get_num());
  }
  return ZPoly(std::move(c));
}

}  // namespace detail

/// Resultant of a and b with respect to t, as a polynomial in t1. The inputs
/// are first scaled to primitive integer form, so the result is the resultant
/// up to a positive constant factor (zero set and real-root structure are
/// unchanged). Throws CommonFactor if it vanishes identically.
inline ZPoly sylvester_resultant(const QBiPoly& a, const QBiPoly& b, const ResultantOptions& opts = {}) {
  if (a.is_zero() || b.is_zero()) throw PolynomialError("resultant of a zero polynomial");
  ZBiPoly ai = to_primitive_integer(a), bi = to_primitive_integer(b);
  ZPoly r;
  if (ai.deg_t() == 0 && bi.deg_t() == 0) {
    throw PolynomialError("resultant needs at least one input of positive degree in t");
  }
  if (opts.method == DeterminantMethod::kFractionFree)
    r = detail::resultant_fraction_free(ai, bi);
  else
    r = detail::resultant_evaluation(ai, bi, opts.workers);
  if (r.is_zero()) throw CommonFactor("polynomials share a common factor in t");
  return r;
}

}  // namespace rpr
