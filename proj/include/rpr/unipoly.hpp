#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "rpr/error.hpp"
#include "rpr/rational.hpp"

namespace rpr {

/// Dense univariate polynomial; coefficient i multiplies x^i. The zero
/// polynomial has no coefficients and degree -1.
template <class T>
class UniPoly {
 public:
  UniPoly() = default;
  UniPoly(std::initializer_list<T> coeffs) : c_(coeffs) { trim(); }
  explicit UniPoly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

  static UniPoly constant(const T& v) { return UniPoly(std::vector<T>{v}); }
  static UniPoly monomial(const T& v, int degree) {
    std::vector<T> c(static_cast<std::size_t>(degree) + 1, T(0));
    c.back() = v;
    return UniPoly(std::move(c));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<T>& coefficients() const { return c_; }
  const T& leading() const { return c_.back(); }

  T coeff(int i) const {
    if (i < 0 || i > degree()) return T(0);
    return c_[static_cast<std::size_t>(i)];
  }

  /// Horner evaluation; U may differ from T (e.g. exact coefficients
  /// evaluated at a floating point argument).
  template <class U>
  U eval(const U& x) const {
    U acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + convert<U>(*it);
    return acc;
  }

  UniPoly derivative() const {
    if (c_.size() <= 1) return UniPoly();
    std::vector<T> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * T(static_cast<long>(i));
    return UniPoly(std::move(d));
  }

  /// p(x) -> p(-x)
  UniPoly reflected() const {
    std::vector<T> d = c_;
    for (std::size_t i = 1; i < d.size(); i += 2) d[i] = -d[i];
    return UniPoly(std::move(d));
  }

  UniPoly& operator+=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator-=(const UniPoly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), T(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  UniPoly& operator*=(const T& s) {
    for (auto& v : c_) v *= s;
    trim();
    return *this;
  }

  friend UniPoly operator+(UniPoly a, const UniPoly& b) { return a += b; }
  friend UniPoly operator-(UniPoly a, const UniPoly& b) { return a -= b; }
  friend UniPoly operator-(UniPoly a) {
    for (auto& v : a.c_) v = -v;
    return a;
  }
  friend UniPoly operator*(UniPoly a, const T& s) { return a *= s; }
  friend UniPoly operator*(const T& s, UniPoly a) { return a *= s; }
  friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
    if (a.is_zero() || b.is_zero()) return UniPoly();
    std::vector<T> out(a.c_.size() + b.c_.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) out[i + j] += a.c_[i] * b.c_[j];
    }
    return UniPoly(std::move(out));
  }
  friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

  UniPoly pow(int e) const {
    UniPoly r = constant(T(1));
    for (int i = 0; i < e; ++i) r = r * *this;
    return r;
  }

  template <class U>
  UniPoly<U> cast() const {
    std::vector<U> d;
    d.reserve(c_.size());
    for (const auto& v : c_) d.push_back(convert<U>(v));
    return UniPoly<U>(std::move(d));
  }

  friend std::ostream& operator<<(std::ostream& os, const UniPoly& p) {
    if (p.is_zero()) return os << "0";
    bool first = true;
    for (int i = p.degree(); i >= 0; --i) {
      if (p.c_[static_cast<std::size_t>(i)] == 0) continue;
      if (!first) os << " + ";
      os << "(" << p.c_[static_cast<std::size_t>(i)] << ")";
      if (i > 0) os << "*x^" << i;
      first = false;
    }
    return os;
  }

  template <class U, class V>
  static U convert(const V& v) {
    if constexpr (std::is_same_v<U, V>) {
      return v;
    } else if constexpr (std::is_floating_point_v<U> && std::is_same_v<V, Rational>) {
      if constexpr (std::is_same_v<U, long double>) return to_long_double(v);
      else return static_cast<U>(v.get_d());
    } else if constexpr (std::is_floating_point_v<U> && std::is_same_v<V, Integer>) {
      return static_cast<U>(v.get_d());
    } else {
      return U(v);
    }
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<T> c_;
};

using QPoly = UniPoly<Rational>;
using ZPoly = UniPoly<Integer>;

// ---------------------------------------------------------------------------
// Integer polynomial arithmetic

inline Integer content(const ZPoly& p) {
  Integer g = 0;
  for (const auto& v : p.coefficients()) {
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    if (g == 1) break;
  }
  return g;
}

/// Divides out the content and makes the leading coefficient positive.
inline ZPoly primitive_part(const ZPoly& p) {
  if (p.is_zero()) return p;
  Integer g = content(p);
  if (p.leading() < 0) g = -g;
  std::vector<Integer> c = p.coefficients();
  for (auto& v : c) mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), g.get_mpz_t());
  return ZPoly(std::move(c));
}

/// Clears denominators and returns the primitive integer multiple of `p`
/// with positive leading coefficient.
inline ZPoly to_primitive_integer(const QPoly& p) {
  if (p.is_zero()) return ZPoly();
  Integer l = 1;
  for (const auto& v : p.coefficients()) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), v.get_den_mpz_t());
  std::vector<Integer> c;
  c.reserve(p.coefficients().size());
  for (const auto& v : p.coefficients()) c.push_back(v.get_num() * (l / v.get_den()));
  return primitive_part(ZPoly(std::move(c)));
}

inline QPoly to_rational(const ZPoly& p) { return p.cast<Rational>(); }

/// lc(b)^(deg a - deg b + 1) * a  mod  b, computed over the integers.
inline ZPoly pseudo_remainder(const ZPoly& a, const ZPoly& b) {
  if (b.is_zero()) throw PolynomialError("pseudo-division by zero polynomial");
  std::vector<Integer> r = a.coefficients();
  const int db = b.degree();
  const Integer& lb = b.leading();
  int dr = a.degree();
  int steps = std::max(dr - db + 1, 0);
  while (dr >= db && dr >= 0) {
    Integer lr = r[static_cast<std::size_t>(dr)];
    for (int i = 0; i <= dr; ++i) r[static_cast<std::size_t>(i)] *= lb;
    for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(dr - db + i)] -= lr * b.coefficients()[static_cast<std::size_t>(i)];
    --steps;
    r.resize(static_cast<std::size_t>(dr));
    dr = static_cast<int>(r.size()) - 1;
    while (dr >= 0 && r[static_cast<std::size_t>(dr)] == 0) --dr;
    r.resize(static_cast<std::size_t>(dr + 1));
  }
  ZPoly out(std::move(r));
  if (steps > 0) {
    Integer f;
    mpz_pow_ui(f.get_mpz_t(), lb.get_mpz_t(), static_cast<unsigned long>(steps));
    out *= f;
  }
  return out;
}

/// a / b when b divides a exactly in Z[x]; throws otherwise.
inline ZPoly exact_quotient(const ZPoly& a, const ZPoly& b) {
  if (b.is_zero()) throw PolynomialError("division by zero polynomial");
  if (a.is_zero()) return ZPoly();
  const int da = a.degree(), db = b.degree();
  if (da < db) throw PolynomialError("inexact polynomial division");
  std::vector<Integer> r = a.coefficients();
  std::vector<Integer> q(static_cast<std::size_t>(da - db + 1));
  const auto& bc = b.coefficients();
  for (int k = da - db; k >= 0; --k) {
    Integer& top = r[static_cast<std::size_t>(k + db)];
    if (!mpz_divisible_p(top.get_mpz_t(), b.leading().get_mpz_t()))
      throw PolynomialError("inexact polynomial division");
    Integer qk;
    mpz_divexact(qk.get_mpz_t(), top.get_mpz_t(), b.leading().get_mpz_t());
    if (qk != 0)
      for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k + i)] -= qk * bc[static_cast<std::size_t>(i)];
    q[static_cast<std::size_t>(k)] = std::move(qk);
  }
  for (const auto& v : r)
    if (v != 0) throw PolynomialError("inexact polynomial division");
  return ZPoly(std::move(q));
}

/// Quotient when b divides a exactly in Z[x].
inline std::optional<ZPoly> try_exact_quotient(const ZPoly& a, const ZPoly& b) {
  try {
    return exact_quotient(a, b);
  } catch (const PolynomialError&) {
    return std::nullopt;
  }
}

namespace detail {

inline ZPoly gcd_prs(ZPoly a, ZPoly b) {
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    ZPoly r = pseudo_remainder(a, b);
    a = std::move(b);
    b = r.is_zero() ? r : primitive_part(r);
  }
  return a;
}

inline Integer max_norm(const ZPoly& p) {
  Integer m = 0;
  for (const auto& v : p.coefficients())
    if (abs(v) > m) m = abs(v);
  return m;
}

// Heuristic gcd: evaluate at a large integer, take the integer gcd and read
// the polynomial back from its symmetric xi-adic digits.
inline std::optional<ZPoly> gcd_heuristic(const ZPoly& a, const ZPoly& b) {
  Integer xi = 2 * std::min(max_norm(a), max_norm(b)) + 29;
  for (int attempt = 0; attempt < 6; ++attempt) {
    Integer ga = abs(a.eval(xi)), gb = abs(b.eval(xi)), gam;
    mpz_gcd(gam.get_mpz_t(), ga.get_mpz_t(), gb.get_mpz_t());
    std::vector<Integer> digits;
    Integer half = xi / 2;
    while (gam != 0) {
      Integer d;
      mpz_mod(d.get_mpz_t(), gam.get_mpz_t(), xi.get_mpz_t());
      if (d > half) d -= xi;
      digits.push_back(d);
      gam = (gam - d) / xi;
    }
    ZPoly g(std::move(digits));
    if (g.degree() >= 0) {
      g = primitive_part(g);
      if (g.degree() == 0) return ZPoly::constant(Integer(1));
      if (try_exact_quotient(a, g) && try_exact_quotient(b, g)) return g;
    }
    xi = xi * 73794 / 27011;
  }
  return std::nullopt;
}

}  // namespace detail

/// Primitive greatest common divisor (integer content dropped).
inline ZPoly gcd(ZPoly a, ZPoly b) {
  if (a.is_zero()) return primitive_part(b);
  if (b.is_zero()) return primitive_part(a);
  a = primitive_part(a);
  b = primitive_part(b);
  if (a.degree() == 0 || b.degree() == 0) return ZPoly::constant(Integer(1));
  if (auto g = detail::gcd_heuristic(a, b)) return *g;
  return detail::gcd_prs(std::move(a), std::move(b));
}

inline QPoly gcd(const QPoly& a, const QPoly& b) {
  return to_rational(gcd(to_primitive_integer(a), to_primitive_integer(b)));
}

/// Quotient and remainder over the rationals.
inline std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw PolynomialError("division by zero polynomial");
  std::vector<Rational> r = a.coefficients();
  const int db = b.degree();
  int dr = a.degree();
  if (dr < db) return {QPoly(), a};
  std::vector<Rational> q(static_cast<std::size_t>(dr - db + 1));
  const auto& bc = b.coefficients();
  for (int k = dr - db; k >= 0; --k) {
    Rational qk = r[static_cast<std::size_t>(k + db)] / b.leading();
    if (qk != 0)
      for (int i = 0; i <= db; ++i) r[static_cast<std::size_t>(k + i)] -= qk * bc[static_cast<std::size_t>(i)];
    q[static_cast<std::size_t>(k)] = qk;
  }
  r.resize(static_cast<std::size_t>(db));
  return {QPoly(std::move(q)), QPoly(std::move(r))};
}

/// Square-free factors a_1, a_2, ... with p = c * prod a_i^i (Yun). Entry
/// i-1 holds a_i; constant factors are kept so multiplicities line up.
inline std::vector<ZPoly> square_free_decomposition(const ZPoly& p) {
  if (p.is_zero()) throw PolynomialError("square-free decomposition of zero polynomial");
  std::vector<ZPoly> out;
  ZPoly a = primitive_part(p);
  if (a.degree() <= 0) return out;
  // Every divisor below is primitive, so the quotients stay in Z[x].
  ZPoly b = a.derivative();
  ZPoly c = gcd(a, b);
  ZPoly w = exact_quotient(a, c);
  ZPoly y = exact_quotient(b, c);
  ZPoly z = y - w.derivative();
  while (w.degree() > 0) {
    ZPoly g = gcd(w, z);
    out.push_back(g);
    w = exact_quotient(w, g);
    y = exact_quotient(z, g);
    z = y - w.derivative();
  }
  while (!out.empty() && out.back().degree() <= 0) out.pop_back();
  return out;
}

/// Square-free part p / gcd(p, p').
inline ZPoly square_free_part(const ZPoly& p) {
  ZPoly a = primitive_part(p);
  if (a.degree() <= 0) return a;
  return primitive_part(exact_quotient(a, gcd(a, a.derivative())));
}

}  // namespace rpr
