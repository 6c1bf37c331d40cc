#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "rpr/error.hpp"
#include "rpr/geometry.hpp"
#include "rpr/roots.hpp"
#include "rpr/trigpoly.hpp"

namespace rpr {

struct AssemblyMode {
  double alpha = 0;
  double theta1 = 0;
  Configuration config;
  /// max |L_i(config) - L_i| over the two solved legs
  double residual = 0;
  /// multiplicity of the eliminant root; > 1 on a singular curve
  int multiplicity = 1;
};

/// Direct kinematics inside one slice L1 = const. The closure equations
///   F2 = X2^2 + Y2^2 - L2^2,  F3 = X3^2 + Y3^2 - L3^2
/// have trig degree one in each angle. Their tan-half forms are quadratics in
/// t = tan(alpha / 2); the closed-form resultant of two quadratics gives an
/// eliminant of degree <= 8 in t1 = tan(theta1 / 2) whose coefficients are
/// affine in L2^2 and L3^2, so the slice-dependent part is built once.
class SliceSolver {
 public:
  SliceSolver(const ManipulatorGeometry& g, double l1, int digits = 17) : g_(g), l1_(l1) {
    validate(g);
    if (!(l1 > length_tolerance(g))) throw DegenerateConfiguration("leg 1 length below tolerance");
    beta_ = platform_angle(g);
    ExactGeometry e = exact_geometry(g, digits);
    Rational L1 = decimal_rational(l1);
    TrigPoly ca = TrigPoly::cos_alpha(), sa = TrigPoly::sin_alpha();
    TrigPoly c1 = TrigPoly::cos_theta1(), s1 = TrigPoly::sin_theta1();
    TrigPoly x2 = L1 * c1 + e.b1 * ca - TrigPoly(e.a2x), y2 = L1 * s1 + e.b1 * sa;
    TrigPoly x3 = L1 * c1 + e.p * ca - e.q * sa - TrigPoly(e.a3x), y3 = L1 * s1 + e.p * sa + e.q * ca - TrigPoly(e.a3y);
    f_[0] = x2 * x2 + y2 * y2;
    f_[1] = x3 * x3 + y3 * y3;
    for (int k = 0; k < 2; ++k) {
      // lift to the full (1, 1) clearing even if a degree is lower
      QBiPoly b = trig_to_bipoly(f_[k]);
      const int da = f_[k].degree_alpha(), d1 = f_[k].degree_theta1();
      if (da < 1) b = b * QBiPoly::outer(QPoly{Rational(1), Rational(0), Rational(1)}, QPoly::constant(Rational(1)));
      if (d1 < 1) b = b * QBiPoly::outer(QPoly::constant(Rational(1)), QPoly{Rational(1), Rational(0), Rational(1)});
      Integer den = 1;
      for (int i = 0; i < 3; ++i)
        for (const auto& c : b.in_t(i).coefficients()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
      den_[k] = den;
      for (int i = 0; i < 3; ++i) {
        std::vector<Integer> z;
        for (const auto& c : b.in_t(i).coefficients()) z.push_back(Integer(c * den));
        int_coeff_[k][static_cast<std::size_t>(i)] = ZPoly(std::move(z));
      }
      split_[k] = split(f_[k]);
    }
  }

  double l1() const { return l1_; }
  const ManipulatorGeometry& geometry() const { return g_; }

  /// Eliminant in t1 for the joint point with squared lengths (lam2, lam3),
  /// exact up to a positive constant factor.
  ZPoly eliminant(const Rational& lam2, const Rational& lam3) const {
    const ZPoly circle{Integer(1), Integer(0), Integer(1)};
    std::array<ZPoly, 3> a, b;
    const Rational* lam[2] = {&lam2, &lam3};
    std::array<ZPoly, 3>* out[2] = {&a, &b};
    for (int k = 0; k < 2; ++k) {
      const Integer& n = lam[k]->get_num();
      const Integer& m = lam[k]->get_den();
      ZPoly shift = circle * Integer(n * den_[k]);
      for (int i = 0; i < 3; ++i) {
        ZPoly c = int_coeff_[k][static_cast<std::size_t>(i)] * m;
        if (i != 1) c -= shift;
        (*out[k])[static_cast<std::size_t>(i)] = std::move(c);
      }
    }
    ZPoly p = a[2] * b[0] - a[0] * b[2];
    return p * p - (a[2] * b[1] - a[1] * b[2]) * (a[1] * b[0] - a[0] * b[1]);
  }

  /// Number of distinct assembly modes at (l2, l3).
  int count(double l2, double l3) const {
    check_lengths(l2, l3);
    Rational lam2 = square(decimal_rational(l2)), lam3 = square(decimal_rational(l3));
    ZPoly r = eliminant(lam2, lam3);
    if (r.is_zero()) throw DegenerateConfiguration("closure equations share a factor");
    int n = count_real_roots(r) + (solution_at_pi(r, lam2, lam3) ? 1 : 0);
    if (n > 6) throw Error("more than six assembly modes");
    return n;
  }

  std::vector<AssemblyMode> modes(double l2, double l3) const {
    check_lengths(l2, l3);
    Rational lam2 = square(decimal_rational(l2)), lam3 = square(decimal_rational(l3));
    ZPoly r = eliminant(lam2, lam3);
    if (r.is_zero()) throw DegenerateConfiguration("closure equations share a factor");
    std::vector<AssemblyMode> out;
    for (const auto& root : real_roots(to_rational(r))) out.push_back(solve_alpha(2 * std::atan(root.value), root.multiplicity, l2, l3));
    if (solution_at_pi(r, lam2, lam3)) {
      int drop = 8 - std::max(r.degree(), 0);
      out.push_back(solve_alpha(std::numbers::pi, std::max(drop, 1), l2, l3));
    }
    if (out.size() > 6) throw Error("more than six assembly modes");
    std::sort(out.begin(), out.end(), [](const AssemblyMode& x, const AssemblyMode& y) {
      if (x.theta1 != y.theta1) return x.theta1 < y.theta1;
      return x.alpha < y.alpha;
    });
    return out;
  }

 private:
  // F = P cos(alpha) + Q sin(alpha) + R with P, Q, R functions of theta1
  struct Split {
    TrigPoly p, q, r;
  };

  static Split split(const TrigPoly& f) {
    Split s;
    for (const auto& [m, c] : f.terms()) {
      TrigPoly term(c);
      for (int e = 0; e < m[2]; ++e) term = term * TrigPoly::cos_theta1();
      for (int e = 0; e < m[3]; ++e) term = term * TrigPoly::sin_theta1();
      if (m[0] == 1 && m[1] == 0)
        s.p += term;
      else if (m[0] == 0 && m[1] == 1)
        s.q += term;
      else if (m[0] == 0 && m[1] == 0)
        s.r += term;
      else
        throw PolynomialError("closure polynomial is not linear in the platform angle");
    }
    return s;
  }

  static Rational square(const Rational& x) { return x * x; }

  void check_lengths(double l2, double l3) const {
    const double eps = length_tolerance(g_);
    if (!(l2 > eps) || !(l3 > eps)) throw DegenerateConfiguration("leg length below tolerance");
  }

  // theta1 = pi is invisible to t1; it is a root iff the eliminant lost degree
  // and the closure equations are solvable there.
  bool solution_at_pi(const ZPoly& r, const Rational& lam2, const Rational& lam3) const {
    if (r.degree() >= 8) return false;
    // exact check: both equations at theta1 = pi are linear in (cos a, sin a)
    auto at_pi = [](const TrigPoly& f) {
      Rational v(0);
      for (const auto& [m, c] : f.terms())
        if (m[3] == 0) v += (m[2] % 2 == 0) ? c : Rational(-c);
      return v;
    };
    Rational p2 = at_pi(split_[0].p), q2 = at_pi(split_[0].q), r2 = at_pi(split_[0].r) - lam2;
    Rational p3 = at_pi(split_[1].p), q3 = at_pi(split_[1].q), r3 = at_pi(split_[1].r) - lam3;
    Rational d = p2 * q3 - p3 * q2;
    if (d == 0) return false;
    Rational c = (q2 * r3 - q3 * r2) / d, s = (p3 * r2 - p2 * r3) / d;
    return c * c + s * s == 1;
  }

  std::array<double, 2> lengths_at(double alpha, double theta1) const {
    const double c1 = std::cos(theta1), s1 = std::sin(theta1);
    const double x2 = l1_ * c1 + g_.d1 * std::cos(alpha) - g_.a2x, y2 = l1_ * s1 + g_.d1 * std::sin(alpha);
    const double x3 = l1_ * c1 + g_.d3 * std::cos(alpha + beta_) - g_.a3x;
    const double y3 = l1_ * s1 + g_.d3 * std::sin(alpha + beta_) - g_.a3y;
    return {std::hypot(x2, y2), std::hypot(x3, y3)};
  }

  double residual(double alpha, double theta1, double l2, double l3) const {
    auto l = lengths_at(alpha, theta1);
    return std::max(std::abs(l[0] - l2), std::abs(l[1] - l3));
  }

  AssemblyMode solve_alpha(double theta1, int multiplicity, double l2, double l3) const {
    const double lam2 = l2 * l2, lam3 = l3 * l3;
    const double p2 = split_[0].p.eval(0, theta1), q2 = split_[0].q.eval(0, theta1), r2 = split_[0].r.eval(0, theta1) - lam2;
    const double p3 = split_[1].p.eval(0, theta1), q3 = split_[1].q.eval(0, theta1), r3 = split_[1].r.eval(0, theta1) - lam3;
    const double d = p2 * q3 - p3 * q2;
    double alpha = std::atan2((p3 * r2 - p2 * r3) / d, (q2 * r3 - q3 * r2) / d);
    if (!std::isfinite(alpha)) alpha = best_alpha(theta1, l2, l3);
    polish(alpha, theta1, l2, l3);
    AssemblyMode m;
    alpha = normalize_angle(alpha);
    theta1 = normalize_angle(theta1);
    m.alpha = alpha;
    m.theta1 = theta1;
    m.config = config_from_slice(g_, {l1_, alpha, theta1}, beta_);
    m.residual = residual(alpha, theta1, l2, l3);
    m.multiplicity = multiplicity;
    return m;
  }

  double best_alpha(double theta1, double l2, double l3) const {
    double best = 0, best_r = INFINITY;
    for (int i = 0; i < 720; ++i) {
      double a = -std::numbers::pi + i * std::numbers::pi / 360;
      double r = residual(a, theta1, l2, l3);
      if (r < best_r) best = a, best_r = r;
    }
    return best;
  }

  // damped Gauss-Newton on (L2^2, L3^2); tolerates the rank drop at double roots
  void polish(double& alpha, double& theta1, double l2, double l3) const {
    double lambda = 1e-12;
    double r0 = residual(alpha, theta1, l2, l3);
    for (int it = 0; it < 40 && r0 > 1e-14 * std::max(1.0, g_.scale()); ++it) {
      const double c1 = std::cos(theta1), s1 = std::sin(theta1);
      const double ca = std::cos(alpha), sa = std::sin(alpha);
      const double cb = std::cos(alpha + beta_), sb = std::sin(alpha + beta_);
      const double x2 = l1_ * c1 + g_.d1 * ca - g_.a2x, y2 = l1_ * s1 + g_.d1 * sa;
      const double x3 = l1_ * c1 + g_.d3 * cb - g_.a3x, y3 = l1_ * s1 + g_.d3 * sb - g_.a3y;
      const double f[2] = {x2 * x2 + y2 * y2 - l2 * l2, x3 * x3 + y3 * y3 - l3 * l3};
      const double j[2][2] = {{2 * (x2 * -g_.d1 * sa + y2 * g_.d1 * ca), 2 * (x2 * -l1_ * s1 + y2 * l1_ * c1)},
                              {2 * (x3 * -g_.d3 * sb + y3 * g_.d3 * cb), 2 * (x3 * -l1_ * s1 + y3 * l1_ * c1)}};
      // (J^T J + lambda diag) dx = -J^T f
      double a00 = j[0][0] * j[0][0] + j[1][0] * j[1][0], a01 = j[0][0] * j[0][1] + j[1][0] * j[1][1];
      double a11 = j[0][1] * j[0][1] + j[1][1] * j[1][1];
      double g0 = -(j[0][0] * f[0] + j[1][0] * f[1]), g1 = -(j[0][1] * f[0] + j[1][1] * f[1]);
      bool improved = false;
      for (int tries = 0; tries < 12 && !improved; ++tries) {
        double m00 = a00 * (1 + lambda), m11 = a11 * (1 + lambda);
        double det = m00 * m11 - a01 * a01;
        if (det == 0) {
          lambda = std::max(lambda * 10, 1e-12);
          continue;
        }
        double da = (g0 * m11 - a01 * g1) / det, dt = (m00 * g1 - a01 * g0) / det;
        double r1 = residual(alpha + da, theta1 + dt, l2, l3);
        if (r1 < r0) {
          alpha += da;
          theta1 += dt;
          r0 = r1;
          lambda = std::max(lambda / 10, 1e-15);
          improved = true;
        } else {
          lambda *= 10;
        }
      }
      if (!improved) break;
    }
  }

  ManipulatorGeometry g_;
  double l1_;
  double beta_ = 0;
  std::array<TrigPoly, 2> f_;
  std::array<std::array<ZPoly, 3>, 2> int_coeff_;
  std::array<Integer, 2> den_;
  std::array<Split, 2> split_;
};

/// All assembly modes (direct kinematics solutions) for L = (L1, L2, L3),
/// sorted by (theta1, alpha). Unreachable L gives an empty list.
inline std::vector<AssemblyMode> assembly_modes(const ManipulatorGeometry& g, const std::array<double, 3>& l) {
  return SliceSolver(g, l[0]).modes(l[1], l[2]);
}

inline int count_assembly_modes(const ManipulatorGeometry& g, const std::array<double, 3>& l) {
  return SliceSolver(g, l[0]).count(l[1], l[2]);
}

}  // namespace rpr
