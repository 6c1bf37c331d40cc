#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "rpr/unipoly.hpp"

namespace rpr {

/// Bivariate polynomial sum c[i][j] t^i t1^j, stored as a polynomial in t
/// whose coefficients are polynomials in t1.
template <class T>
class BiPoly {
 public:
  using Column = UniPoly<T>;

  BiPoly() = default;
  explicit BiPoly(std::vector<Column> rows) : rows_(std::move(rows)) { trim(); }

  /// a(t) * b(t1)
  static BiPoly outer(const UniPoly<T>& in_t, const UniPoly<T>& in_t1) {
    std::vector<Column> rows;
    rows.reserve(in_t.coefficients().size());
    for (const auto& v : in_t.coefficients()) rows.push_back(in_t1 * v);
    return BiPoly(std::move(rows));
  }

  bool is_zero() const { return rows_.empty(); }
  int deg_t() const { return static_cast<int>(rows_.size()) - 1; }
  int deg_t1() const {
    int d = -1;
    for (const auto& r : rows_) d = std::max(d, r.degree());
    return d;
  }

  /// Coefficient of t^i as a polynomial in t1.
  const Column& in_t(int i) const {
    static const Column zero;
    if (i < 0 || i > deg_t()) return zero;
    return rows_[static_cast<std::size_t>(i)];
  }
  const std::vector<Column>& rows() const { return rows_; }
  T coeff(int i, int j) const { return in_t(i).coeff(j); }

  template <class U>
  U eval(const U& t, const U& t1) const {
    U acc(0);
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) acc = acc * t + it->eval(t1);
    return acc;
  }

  /// sum |c_ij| |t|^i |t1|^j, the scale used to normalize residuals.
  template <class U>
  U eval_abs(const U& t, const U& t1) const {
    U acc(0);
    const U at = t < 0 ? -t : t;
    const U at1 = t1 < 0 ? -t1 : t1;
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it) {
      U inner(0);
      const auto& c = it->coefficients();
      for (auto jt = c.rbegin(); jt != c.rend(); ++jt) {
        U v = Column::template convert<U>(*jt);
        inner = inner * at1 + (v < 0 ? -v : v);
      }
      acc = acc * at + inner;
    }
    return acc;
  }

  /// |p(t, t1)| / sum |c_ij| |t|^i |t1|^j (0 for the zero polynomial).
  template <class U>
  U normalized(const U& t, const U& t1) const {
    U scale = eval_abs(t, t1);
    if (scale == 0) return U(0);
    U v = eval(t, t1);
    return (v < 0 ? -v : v) / scale;
  }

  /// Polynomial in t obtained by fixing t1.
  template <class U>
  UniPoly<U> at_t1(const U& t1) const {
    std::vector<U> c;
    c.reserve(rows_.size());
    for (const auto& r : rows_) c.push_back(r.eval(t1));
    return UniPoly<U>(std::move(c));
  }

  /// Polynomial in t1 obtained by fixing t.
  template <class U>
  UniPoly<U> at_t(const U& t) const {
    UniPoly<U> acc;
    for (auto it = rows_.rbegin(); it != rows_.rend(); ++it)
      acc = acc * UniPoly<U>::constant(t) + it->template cast<U>();
    return acc;
  }

  /// Exchanges the roles of t and t1.
  BiPoly swapped() const {
    const int dt1 = deg_t1();
    std::vector<std::vector<T>> cols(static_cast<std::size_t>(dt1 + 1), std::vector<T>(rows_.size(), T(0)));
    for (std::size_t i = 0; i < rows_.size(); ++i) {
      const auto& c = rows_[i].coefficients();
      for (std::size_t j = 0; j < c.size(); ++j) cols[j][i] = c[j];
    }
    std::vector<Column> out;
    out.reserve(cols.size());
    for (auto& c : cols) out.emplace_back(std::move(c));
    return BiPoly(std::move(out));
  }

  BiPoly& operator+=(const BiPoly& o) {
    if (o.rows_.size() > rows_.size()) rows_.resize(o.rows_.size());
    for (std::size_t i = 0; i < o.rows_.size(); ++i) rows_[i] += o.rows_[i];
    trim();
    return *this;
  }
  BiPoly& operator-=(const BiPoly& o) {
    if (o.rows_.size() > rows_.size()) rows_.resize(o.rows_.size());
    for (std::size_t i = 0; i < o.rows_.size(); ++i) rows_[i] -= o.rows_[i];
    trim();
    return *this;
  }
  BiPoly& operator*=(const T& s) {
    for (auto& r : rows_) r *= s;
    trim();
    return *this;
  }
  friend BiPoly operator+(BiPoly a, const BiPoly& b) { return a += b; }
  friend BiPoly operator-(BiPoly a, const BiPoly& b) { return a -= b; }
  friend BiPoly operator*(BiPoly a, const T& s) { return a *= s; }
  friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
    if (a.is_zero() || b.is_zero()) return BiPoly();
    std::vector<Column> out(a.rows_.size() + b.rows_.size() - 1);
    for (std::size_t i = 0; i < a.rows_.size(); ++i) {
      if (a.rows_[i].is_zero()) continue;
      for (std::size_t j = 0; j < b.rows_.size(); ++j) out[i + j] += a.rows_[i] * b.rows_[j];
    }
    return BiPoly(std::move(out));
  }
  friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.rows_ == b.rows_; }

  /// Divides by (1 + t^2) if it is an exact factor; returns false otherwise
  /// (leaving the polynomial untouched).
  bool divide_circle_t() {
    if (deg_t() < 2) return false;
    std::vector<Column> r = rows_;
    std::vector<Column> q(r.size() - 2);
    for (int k = deg_t(); k >= 2; --k) {
      q[static_cast<std::size_t>(k - 2)] = r[static_cast<std::size_t>(k)];
      r[static_cast<std::size_t>(k - 2)] -= r[static_cast<std::size_t>(k)];
    }
    if (!r[0].is_zero() || !r[1].is_zero()) return false;
    rows_ = std::move(q);
    trim();
    return true;
  }

  /// Removes every factor (1 + t^2) and (1 + t1^2); these have no real zeros.
  /// Returns the number of factors removed in t and in t1.
  std::pair<int, int> strip_circle_factors() {
    int nt = 0, nt1 = 0;
    while (divide_circle_t()) ++nt;
    BiPoly s = swapped();
    while (s.divide_circle_t()) ++nt1;
    *this = s.swapped();
    return {nt, nt1};
  }

  template <class U>
  BiPoly<U> cast() const {
    std::vector<UniPoly<U>> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(r.template cast<U>());
    return BiPoly<U>(std::move(out));
  }

 private:
  void trim() {
    while (!rows_.empty() && rows_.back().is_zero()) rows_.pop_back();
  }

  std::vector<Column> rows_;
};

using QBiPoly = BiPoly<Rational>;
using ZBiPoly = BiPoly<Integer>;

/// Primitive integer multiple of a rational bivariate polynomial (positive
/// scale factor, so zero sets and signs are preserved).
inline ZBiPoly to_primitive_integer(const QBiPoly& p) {
  Integer l = 1;
  for (const auto& r : p.rows())
    for (const auto& v : r.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  Integer g = 0;
  std::vector<ZPoly> rows;
  rows.reserve(p.rows().size());
  for (const auto& r : p.rows()) {
    std::vector<Integer> c;
    c.reserve(r.coefficients().size());
    for (const auto& v : r.coefficients()) {
      c.push_back(v.get_num() * (l / v.get_den()));
      mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.back().get_mpz_t());
    }
    rows.emplace_back(std::move(c));
  }
  if (g > 1)
    for (auto& r : rows) {
      std::vector<Integer> c = r.coefficients();
      for (auto& v : c) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
      r = ZPoly(std::move(c));
    }
  return ZBiPoly(std::move(rows));
}

/// Floating evaluation of an exact polynomial.
inline double eval_bipoly(const QBiPoly& p, double t, double t1) { return p.eval<double>(t, t1); }

}  // namespace rpr
