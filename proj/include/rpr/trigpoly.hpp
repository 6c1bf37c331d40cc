#pragma once

#include <array>
#include <cmath>
#include <map>
#include <vector>

#include "rpr/bipoly.hpp"

namespace rpr {

/// Polynomial in (cos a, sin a, cos b, sin b) for two angles a = alpha and
/// b = theta1, with exact rational coefficients. Kept reduced modulo
/// sin^2 + cos^2 = 1, so every sine appears at most to the first power and
/// the representation is canonical.
class TrigPoly {
 public:
  /// exponents of (cos alpha, sin alpha, cos theta1, sin theta1)
  using Monomial = std::array<int, 4>;

  TrigPoly() = default;
  explicit TrigPoly(const Rational& c) {
    if (c != 0) terms_[{0, 0, 0, 0}] = c;
  }

  static TrigPoly cos_alpha() { return single({1, 0, 0, 0}); }
  static TrigPoly sin_alpha() { return single({0, 1, 0, 0}); }
  static TrigPoly cos_theta1() { return single({0, 0, 1, 0}); }
  static TrigPoly sin_theta1() { return single({0, 0, 0, 1}); }

  const std::map<Monomial, Rational>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  /// Trigonometric degree in alpha (max of cos+sin exponents).
  int degree_alpha() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[0] + m[1]);
    return d;
  }
  int degree_theta1() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m[2] + m[3]);
    return d;
  }

  TrigPoly& operator+=(const TrigPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  TrigPoly& operator-=(const TrigPoly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  TrigPoly& operator*=(const Rational& s) {
    if (s == 0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend TrigPoly operator+(TrigPoly a, const TrigPoly& b) { return a += b; }
  friend TrigPoly operator-(TrigPoly a, const TrigPoly& b) { return a -= b; }
  friend TrigPoly operator-(TrigPoly a) { return a *= Rational(-1); }
  friend TrigPoly operator*(TrigPoly a, const Rational& s) { return a *= s; }
  friend TrigPoly operator*(const Rational& s, TrigPoly a) { return a *= s; }
  friend TrigPoly operator*(const TrigPoly& a, const TrigPoly& b) {
    TrigPoly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) {
        Monomial m{ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2], ma[3] + mb[3]};
        out.add_reduced(m, ca * cb);
      }
    return out;
  }
  friend bool operator==(const TrigPoly& a, const TrigPoly& b) { return a.terms_ == b.terms_; }

  /// d/d alpha
  TrigPoly diff_alpha() const { return differentiate(0); }
  /// d/d theta1
  TrigPoly diff_theta1() const { return differentiate(2); }

  double eval(double alpha, double theta1) const {
    const double v[4] = {std::cos(alpha), std::sin(alpha), std::cos(theta1), std::sin(theta1)};
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = c.get_d();
      for (int k = 0; k < 4; ++k)
        for (int e = 0; e < m[k]; ++e) term *= v[k];
      acc += term;
    }
    return acc;
  }

  /// sum of |c| |monomial| at the point, the scale for normalized residuals.
  double eval_abs(double alpha, double theta1) const {
    const double v[4] = {std::abs(std::cos(alpha)), std::abs(std::sin(alpha)), std::abs(std::cos(theta1)),
                         std::abs(std::sin(theta1))};
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
      double term = std::abs(c.get_d());
      for (int k = 0; k < 4; ++k)
        for (int e = 0; e < m[k]; ++e) term *= v[k];
      acc += term;
    }
    return acc;
  }

 private:
  static TrigPoly single(const Monomial& m) {
    TrigPoly p;
    p.terms_[m] = Rational(1);
    return p;
  }

  void add_term(const Monomial& m, const Rational& c) {
    if (c == 0) return;
    auto it = terms_.find(m);
    if (it == terms_.end()) {
      terms_.emplace(m, c);
    } else {
      it->second += c;
      if (it->second == 0) terms_.erase(it);
    }
  }

  /// Adds c * m after rewriting sin^2 as 1 - cos^2 in both angles.
  void add_reduced(Monomial m, const Rational& c) {
    for (int k : {1, 3}) {
      if (m[k] >= 2) {
        Monomial lowered = m;
        lowered[k] -= 2;
        add_reduced(lowered, c);
        Monomial shifted = lowered;
        shifted[k - 1] += 2;
        add_reduced(shifted, -c);
        return;
      }
    }
    add_term(m, c);
  }

  /// d/dx of cos^a sin^b in angle slot (cos index `k`, sin index `k+1`).
  TrigPoly differentiate(int k) const {
    TrigPoly out;
    for (const auto& [m, c] : terms_) {
      if (m[k] > 0) {
        Monomial d = m;
        d[k] -= 1;
        d[k + 1] += 1;
        out.add_reduced(d, c * m[k] * -1);
      }
      if (m[k + 1] > 0) {
        Monomial d = m;
        d[k + 1] -= 1;
        d[k] += 1;
        out.add_reduced(d, c * m[k + 1]);
      }
    }
    return out;
  }

  std::map<Monomial, Rational> terms_;
};

/// Tan-half-angle conversion: cos x = (1 - s^2)/(1 + s^2), sin x = 2s/(1 + s^2)
/// with s = t for alpha and s = t1 for theta1, denominators cleared by
/// (1+t^2)^d_alpha (1+t1^2)^d_theta1 where the d are the trigonometric degrees.
inline QBiPoly trig_to_bipoly(const TrigPoly& p) {
  if (p.is_zero()) return QBiPoly();
  const int da = p.degree_alpha();
  const int d1 = p.degree_theta1();
  const int dmax = std::max(da, d1);
  const QPoly one_minus{Rational(1), Rational(0), Rational(-1)};
  const QPoly one_plus{Rational(1), Rational(0), Rational(1)};
  const QPoly two_s{Rational(0), Rational(2)};
  std::vector<QPoly> pm(static_cast<std::size_t>(dmax) + 1), pp(pm.size()), ps(2);
  pm[0] = pp[0] = QPoly::constant(Rational(1));
  for (std::size_t i = 1; i < pm.size(); ++i) {
    pm[i] = pm[i - 1] * one_minus;
    pp[i] = pp[i - 1] * one_plus;
  }
  ps[0] = QPoly::constant(Rational(1));
  ps[1] = two_s;
  QBiPoly out;
  for (const auto& [m, c] : p.terms()) {
    QPoly in_t = pm[static_cast<std::size_t>(m[0])] * ps[static_cast<std::size_t>(m[1])] *
                 pp[static_cast<std::size_t>(da - m[0] - m[1])];
    QPoly in_t1 = pm[static_cast<std::size_t>(m[2])] * ps[static_cast<std::size_t>(m[3])] *
                  pp[static_cast<std::size_t>(d1 - m[2] - m[3])];
    out += QBiPoly::outer(in_t * c, in_t1);
  }
  return out;
}

}  // namespace rpr
