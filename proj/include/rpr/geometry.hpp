#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "rpr/error.hpp"
#include "rpr/rational.hpp"

namespace rpr {

/// Planar 3-RPR manipulator. A1 sits at the origin, A2 = (a2x, 0) on the
/// x-axis and A3 = (a3x, a3y). Platform sides: d1 = |B1B2|, d2 = |B2B3|,
/// d3 = |B3B1|. beta_sign picks the platform chirality (+1: B1, B2, B3
/// counter-clockwise).
struct ManipulatorGeometry {
  double a2x = 0.0;
  double a3x = 0.0;
  double a3y = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  int beta_sign = 1;
  /// Accept platforms whose three vertices are collinear (beta = 0 or pi).
  bool allow_collinear = false;

  double b1() const { return d1; }
  double b3() const { return d3; }

  /// Largest length in the description; tolerances scale with it.
  double scale() const {
    return std::max({std::abs(a2x), std::abs(a3x), std::abs(a3y), d1, d2, d3});
  }
};

namespace detail {

/// Exact numerator and denominator of cos(beta) from the decimal side lengths.
inline std::pair<Rational, Rational> cos_beta_exact(const ManipulatorGeometry& g) {
  Rational d1 = decimal_rational(g.d1), d2 = decimal_rational(g.d2), d3 = decimal_rational(g.d3);
  return {Rational(d1 * d1 + d3 * d3 - d2 * d2), Rational(2 * d1 * d3)};
}

}  // namespace detail

/// Checks the geometry invariants; throws DegeneratePlatform or Error.
inline void validate(const ManipulatorGeometry& g) {
  for (double v : {g.a2x, g.a3x, g.a3y, g.d1, g.d2, g.d3})
    if (!std::isfinite(v)) throw Error("geometry contains a non-finite value");
  if (g.d1 <= 0 || g.d2 <= 0 || g.d3 <= 0) throw DegeneratePlatform("platform sides must be positive");
  if (g.a2x <= 0) throw Error("a2x must be positive (x-axis runs from A1 through A2)");
  if (g.beta_sign != 1 && g.beta_sign != -1) throw Error("beta_sign must be +1 or -1");
  auto [num, den] = detail::cos_beta_exact(g);
  int order = cmp(abs(num), den);
  if (order > 0) throw DegeneratePlatform("platform sides violate the triangle inequality");
  if (order == 0 && !g.allow_collinear)
    throw DegeneratePlatform("platform vertices are collinear (triangle inequality is not strict)");
}

/// Angle between B1B2 and B1B3, signed by beta_sign.
inline double platform_angle(const ManipulatorGeometry& g) {
  validate(g);
  auto [num, den] = detail::cos_beta_exact(g);
  double c = std::clamp(Rational(num / den).get_d(), -1.0, 1.0);
  return g.beta_sign * std::acos(c);
}

/// Slice coordinates: leg 1 length, platform orientation alpha (direction of
/// B1B2) and leg 1 angle theta1.
struct SlicePose {
  double l1 = 0.0;
  double alpha = 0.0;
  double theta1 = 0.0;
};

/// Joint coordinates inside a fixed-L1 slice.
struct JointPoint {
  double l2 = 0.0;
  double l3 = 0.0;
};

/// Arbitrary (L, theta) tuple, not necessarily on the configuration manifold.
struct LegState {
  std::array<double, 3> lengths{};
  std::array<double, 3> angles{};
};

/// Wraps an angle into [-pi, pi).
inline double normalize_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r < 0) r += two_pi;
  double out = r - std::numbers::pi;
  return out >= std::numbers::pi ? -std::numbers::pi : out;
}

/// Distance between two angles modulo 2 pi.
inline double angle_distance(double a, double b) { return std::abs(normalize_angle(a - b)); }

/// Platform vertex B_i in the fixed frame.
inline std::array<double, 2> vertex(const ManipulatorGeometry& g, const LegState& s, int i) {
  const double base_x[3] = {0.0, g.a2x, g.a3x};
  const double base_y[3] = {0.0, 0.0, g.a3y};
  return {base_x[i] + s.lengths[static_cast<std::size_t>(i)] * std::cos(s.angles[static_cast<std::size_t>(i)]),
          base_y[i] + s.lengths[static_cast<std::size_t>(i)] * std::sin(s.angles[static_cast<std::size_t>(i)])};
}

/// Distance constraints |B2-B1|^2 - d1^2, |B3-B2|^2 - d2^2, |B1-B3|^2 - d3^2.
inline std::array<double, 3> constraint_residuals(const ManipulatorGeometry& g, const LegState& s) {
  auto b1 = vertex(g, s, 0), b2 = vertex(g, s, 1), b3 = vertex(g, s, 2);
  auto sq = [](const std::array<double, 2>& p, const std::array<double, 2>& q) {
    double dx = p[0] - q[0], dy = p[1] - q[1];
    return dx * dx + dy * dy;
  };
  return {sq(b2, b1) - g.d1 * g.d1, sq(b3, b2) - g.d2 * g.d2, sq(b1, b3) - g.d3 * g.d3};
}

/// Leg vectors (L2 cos th2, L2 sin th2, L3 cos th3, L3 sin th3) from the closure equations.
struct LegVectors {
  double x2 = 0.0;
  double y2 = 0.0;
  double x3 = 0.0;
  double y3 = 0.0;
};

/// Same as below with the platform angle supplied (hot loops).
inline LegVectors leg_vectors(const ManipulatorGeometry& g, const SlicePose& p, double beta) {
  const double c1 = std::cos(p.theta1), s1 = std::sin(p.theta1);
  return {p.l1 * c1 + g.b1() * std::cos(p.alpha) - g.a2x, p.l1 * s1 + g.b1() * std::sin(p.alpha),
          p.l1 * c1 + g.b3() * std::cos(p.alpha + beta) - g.a3x,
          p.l1 * s1 + g.b3() * std::sin(p.alpha + beta) - g.a3y};
}

inline LegVectors leg_vectors(const ManipulatorGeometry& g, const SlicePose& p) {
  return leg_vectors(g, p, platform_angle(g));
}

/// A point on the configuration manifold. Only built by config_from_slice or
/// Configuration::verified, so the constraint residuals are known to vanish.
class Configuration {
 public:
  const std::array<double, 3>& lengths() const { return state_.lengths; }
  const std::array<double, 3>& angles() const { return state_.angles; }
  const LegState& state() const { return state_; }
  double l(int i) const { return state_.lengths[static_cast<std::size_t>(i)]; }
  double theta(int i) const { return state_.angles[static_cast<std::size_t>(i)]; }
  JointPoint joint_point() const { return {state_.lengths[1], state_.lengths[2]}; }

  /// L2 (resp. L3) below the length tolerance: the leg angle is undefined
  /// and the constraints are not differentiable there.
  bool degenerate_leg2() const { return degenerate_[0]; }
  bool degenerate_leg3() const { return degenerate_[1]; }
  bool degenerate() const { return degenerate_[0] || degenerate_[1]; }

  /// Accepts (L, theta) only if every residual is within tol * d_i^2.
  static Configuration verified(const ManipulatorGeometry& g, const LegState& s, double tol = 1e-9);

 private:
  friend Configuration config_from_slice(const ManipulatorGeometry& g, const SlicePose& p, double beta);
  LegState state_;
  std::array<bool, 2> degenerate_{false, false};
};

/// Length tolerance below which a leg is considered collapsed.
inline double length_tolerance(const ManipulatorGeometry& g) { return 1e-9 * g.scale(); }

inline Configuration config_from_slice(const ManipulatorGeometry& g, const SlicePose& p, double beta) {
  LegVectors v = leg_vectors(g, p, beta);
  Configuration c;
  c.state_.lengths = {p.l1, std::hypot(v.x2, v.y2), std::hypot(v.x3, v.y3)};
  c.state_.angles = {normalize_angle(p.theta1), std::atan2(v.y2, v.x2), std::atan2(v.y3, v.x3)};
  const double eps = length_tolerance(g);
  c.degenerate_ = {c.state_.lengths[1] < eps, c.state_.lengths[2] < eps};
  return c;
}

inline Configuration config_from_slice(const ManipulatorGeometry& g, const SlicePose& p) {
  return config_from_slice(g, p, platform_angle(g));
}

inline Configuration Configuration::verified(const ManipulatorGeometry& g, const LegState& s, double tol) {
  auto r = constraint_residuals(g, s);
  const double d2[3] = {g.d1 * g.d1, g.d2 * g.d2, g.d3 * g.d3};
  for (int i = 0; i < 3; ++i)
    if (std::abs(r[static_cast<std::size_t>(i)]) > tol * d2[i])
      throw Error("configuration does not satisfy the closure constraints");
  Configuration c;
  c.state_ = s;
  const double eps = length_tolerance(g);
  c.degenerate_ = {s.lengths[1] < eps, s.lengths[2] < eps};
  return c;
}

/// Recovers the slice pose of a configuration (alpha from B1 -> B2).
inline SlicePose slice_pose(const ManipulatorGeometry& g, const Configuration& c) {
  LegState s = c.state();
  auto b1 = vertex(g, s, 0), b2 = vertex(g, s, 1);
  return {c.l(0), std::atan2(b2[1] - b1[1], b2[0] - b1[0]), normalize_angle(c.theta(0))};
}

/// Geometry constants as exact rationals for polynomial construction. B3 in
/// the platform frame (origin B1, x-axis along B1B2) is (p, q) with
/// p = d3 cos(beta) exact and q = d3 sin(beta) rounded to `digits`
/// significant digits unless it is rational.
struct ExactGeometry {
  Rational a2x, a3x, a3y, b1, p, q;
};

inline ExactGeometry exact_geometry(const ManipulatorGeometry& g, int digits = 24) {
  validate(g);
  ExactGeometry e;
  e.a2x = decimal_rational(g.a2x);
  e.a3x = decimal_rational(g.a3x);
  e.a3y = decimal_rational(g.a3y);
  e.b1 = decimal_rational(g.d1);
  Rational d1 = e.b1, d2 = decimal_rational(g.d2), d3 = decimal_rational(g.d3);
  e.p = (d1 * d1 + d3 * d3 - d2 * d2) / (2 * d1);
  Rational q2 = d3 * d3 - e.p * e.p;
  e.q = sqrt_rational(q2 < 0 ? Rational(0) : q2, digits);
  if (g.beta_sign < 0) e.q = -e.q;
  return e;
}

}  // namespace rpr
