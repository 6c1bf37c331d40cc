#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rpr/directkin.hpp"
#include "rpr/error.hpp"
#include "rpr/geometry.hpp"
#include "rpr/kinecore.hpp"
#include "rpr/parallel.hpp"
#include "rpr/resultant.hpp"
#include "rpr/roots.hpp"
#include "rpr/trigpoly.hpp"

namespace rpr {

/// Closure quantities of a slice as trigonometric polynomials in (alpha, theta1).
/// With `shifted`, the polynomial variables are alpha - pi/2 and theta1 - pi/2,
/// which moves the tan-half blind spot away from alpha = pi and theta1 = pi.
struct SliceTrig {
  TrigPoly ca, sa, c1, s1;
  TrigPoly x2, y2, x3, y3;
  Rational l1;
  ExactGeometry e;
};

inline SliceTrig slice_trig(const ExactGeometry& e, const Rational& l1, bool shifted = false) {
  SliceTrig s;
  s.e = e;
  s.l1 = l1;
  if (shifted) {
    s.ca = -TrigPoly::sin_alpha();
    s.sa = TrigPoly::cos_alpha();
    s.c1 = -TrigPoly::sin_theta1();
    s.s1 = TrigPoly::cos_theta1();
  } else {
    s.ca = TrigPoly::cos_alpha();
    s.sa = TrigPoly::sin_alpha();
    s.c1 = TrigPoly::cos_theta1();
    s.s1 = TrigPoly::sin_theta1();
  }
  s.x2 = l1 * s.c1 + e.b1 * s.ca - TrigPoly(e.a2x);
  s.y2 = l1 * s.s1 + e.b1 * s.sa;
  s.x3 = l1 * s.c1 + e.p * s.ca - e.q * s.sa - TrigPoly(e.a3x);
  s.y3 = l1 * s.s1 + e.p * s.sa + e.q * s.ca - TrigPoly(e.a3y);
  return s;
}

/// Singularity condition times L2 L3, written through the leg vectors.
inline TrigPoly singularity_trig(const SliceTrig& s) {
  const auto& e = s.e;
  return e.a2x * s.y2 * (s.y3 * s.c1 - s.x3 * s.s1) + (e.a3x * s.y3 - e.a3y * s.x3) * (s.s1 * s.x2 - s.c1 * s.y2);
}

/// The six k factors as polynomials (no division by leg lengths is needed).
inline std::array<TrigPoly, 6> k_factor_trig(const SliceTrig& s) {
  const auto& e = s.e;
  const Rational two(2);
  TrigPoly l2s12 = s.s1 * s.x2 - s.c1 * s.y2;
  TrigPoly l3s13 = s.s1 * s.x3 - s.c1 * s.y3;
  TrigPoly l23s23 = s.y2 * s.x3 - s.x2 * s.y3;
  TrigPoly k1 = two * (Rational(e.a3x - e.a2x) * s.y2 + l23s23 - e.a3y * s.x2);
  TrigPoly k2 = -two * (s.l1 * l3s13 + e.a3x * s.y3 - e.a3y * s.x3);
  TrigPoly k3 = -two * (Rational(e.a3x - e.a2x) * s.y3 + l23s23 - e.a3y * s.x3);
  TrigPoly k4 = Rational(two * s.l1) * (l3s13 + e.a3x * s.s1 - e.a3y * s.c1);
  TrigPoly k5 = -two * (s.l1 * l2s12 + e.a2x * s.y2);
  TrigPoly k6 = Rational(two * s.l1) * (l2s12 + e.a2x * s.s1);
  return {k1, k2, k3, k4, k5, k6};
}

/// v^T (u1 H1 + u2 H2 + u3 H3) v with u, v the first adjugate row and column.
/// Equal to the numeric cusp scalar with no clearing factor.
inline TrigPoly cusp_trig(const SliceTrig& s) {
  const auto& e = s.e;
  const Rational two(2);
  auto [k1, k2, k3, k4, k5, k6] = k_factor_trig(s);
  (void)k6;
  TrigPoly l2c21 = s.c1 * s.x2 + s.s1 * s.y2;
  TrigPoly l3c31 = s.c1 * s.x3 + s.s1 * s.y3;
  TrigPoly l23c23 = s.x2 * s.x3 + s.y2 * s.y3;
  const Rational& l1 = s.l1;

  // Hessian entries (symmetric, structural zeros omitted)
  TrigPoly h1_00 = Rational(two * l1) * (e.a2x * s.c1 + l2c21);
  TrigPoly h1_01 = Rational(-two * l1) * l2c21;
  TrigPoly h1_11 = -two * (e.a2x * s.x2 - l1 * l2c21);
  TrigPoly h2_11 = -two * (Rational(e.a2x - e.a3x) * s.x2 - l23c23 - e.a3y * s.y2);
  TrigPoly h2_12 = -two * l23c23;
  TrigPoly h2_22 = two * (Rational(e.a2x - e.a3x) * s.x3 + l23c23 - e.a3y * s.y3);
  TrigPoly h3_00 = Rational(two * l1) * (e.a3x * s.c1 + l3c31 + e.a3y * s.s1);
  TrigPoly h3_02 = Rational(-two * l1) * l3c31;
  TrigPoly h3_22 = two * (l1 * l3c31 - e.a3x * s.x3 - e.a3y * s.y3);

  TrigPoly u1 = k1 * k2, u2 = -(k2 * k5), u3 = k3 * k5;
  TrigPoly v1 = k1 * k2, v2 = k3 * k4, v3 = -(k1 * k4);

  TrigPoly q1 = h1_00 * v1 * v1 + two * h1_01 * v1 * v2 + h1_11 * v2 * v2;
  TrigPoly q2 = h2_11 * v2 * v2 + two * h2_12 * v2 * v3 + h2_22 * v3 * v3;
  TrigPoly q3 = h3_00 * v1 * v1 + two * h3_02 * v1 * v3 + h3_22 * v3 * v3;
  return u1 * q1 + u2 * q2 + u3 * q3;
}

/// Tan-half form of a trig polynomial with the (1 + t^2) factors divided out.
/// eval(t, t1) = trig(alpha, theta1) * (1 + t^2)^clear_t * (1 + t1^2)^clear_t1.
struct SlicePolynomial {
  TrigPoly trig;
  QBiPoly poly;
  int clear_t = 0;
  int clear_t1 = 0;
};

inline SlicePolynomial slice_polynomial(TrigPoly trig) {
  SlicePolynomial out;
  out.poly = trig_to_bipoly(trig);
  auto [st, st1] = out.poly.strip_circle_factors();
  out.clear_t = trig.degree_alpha() - st;
  out.clear_t1 = trig.degree_theta1() - st1;
  out.trig = std::move(trig);
  return out;
}

struct CuspOptions {
  /// Significant digits for the irrational platform offset.
  int digits = 24;
  unsigned workers = 0;
  /// Run the second, quarter-turn shifted pass.
  bool shifted_pass = true;
  double residual_tol = 1e-8;
  /// Normalized cusp scalar above which a common root is spurious.
  double kernel_tol = 1e-7;
  double dedupe_tol = 1e-6;
};

namespace detail {

inline void require_positive_l1(double l1) {
  if (!(l1 > 0) || !std::isfinite(l1)) throw Error("l1 must be positive");
}

inline SliceTrig slice_trig_for(const ManipulatorGeometry& g, double l1, bool shifted, int digits = 24) {
  require_positive_l1(l1);
  return slice_trig(exact_geometry(g, digits), decimal_rational(l1), shifted);
}

}  // namespace detail

inline SlicePolynomial singularity_polynomial(const ManipulatorGeometry& g, double l1, bool shifted = false) {
  return slice_polynomial(singularity_trig(detail::slice_trig_for(g, l1, shifted)));
}

inline SlicePolynomial cusp_polynomial(const ManipulatorGeometry& g, double l1, bool shifted = false) {
  return slice_polynomial(cusp_trig(detail::slice_trig_for(g, l1, shifted)));
}

inline QBiPoly singularity_bipoly(const ManipulatorGeometry& g, double l1) { return singularity_polynomial(g, l1).poly; }

inline QBiPoly cusp_bipoly(const ManipulatorGeometry& g, double l1) { return cusp_polynomial(g, l1).poly; }

struct CuspPoint {
  double l1 = 0;
  double alpha = 0;
  double theta1 = 0;
  double l2 = 0;
  double l3 = 0;
  double t = 0;
  double t1 = 0;
  double residual_singular = 0;
  double residual_cusp = 0;
  bool excluded_axis = false;
  /// Multiplicity of the resultant root the point came from.
  int multiplicity = 1;
};

struct CuspDiagnostics {
  int singular_degree_t = 0;
  int singular_degree_t1 = 0;
  int cusp_degree_t = 0;
  int cusp_degree_t1 = 0;
  int resultant_degree = 0;
  int square_free_degree = 0;
  /// Degree left after removing repeated, spurious and non-real circle factors.
  int relevant_degree = 0;
  int resultant_real_roots = 0;
  int candidates = 0;
  int rejected_residual = 0;
  int rejected_spurious = 0;
  int degenerate_kernel = 0;
  int excluded_axis = 0;
  int repeated_roots = 0;
  bool tangency_fallback = false;
};

struct CuspReport {
  std::vector<CuspPoint> cusps;
  std::vector<CuspPoint> excluded;
  CuspDiagnostics diagnostics;
};

namespace detail {

inline std::pair<double, double> unshift(double phi_a, double phi_1, bool shifted) {
  const double q = shifted ? std::numbers::pi / 2 : 0.0;
  return {normalize_angle(phi_a + q), normalize_angle(phi_1 + q)};
}

/// Removes from `s` every factor it shares with `f`.
inline ZPoly remove_shared(ZPoly s, const ZPoly& f) {
  if (f.degree() <= 0) return s;
  for (;;) {
    ZPoly g = gcd(s, f);
    if (g.degree() <= 0) return s;
    s = exact_quotient(s, g);
  }
}

/// Square-free resultant with the factors of known non-cusp loci removed:
/// pairs of vanishing k factors (these include the collapsed-leg loci) and
/// 1 + t1^2.
inline ZPoly relevant_factor(const ZPoly& resultant, const SliceTrig& s, unsigned workers) {
  ZPoly out = square_free_part(resultant);
  out = remove_shared(out, ZPoly{Integer(1), Integer(0), Integer(1)});
  auto k = k_factor_trig(s);
  std::vector<QBiPoly> kb;
  for (const auto& f : k) kb.push_back(trig_to_bipoly(f));
  const std::pair<int, int> pairs[] = {{0, 2}, {0, 3}, {1, 3}, {1, 2}, {1, 4}, {0, 4}};
  for (auto [a, b] : pairs) {
    if (kb[static_cast<std::size_t>(a)].is_zero() || kb[static_cast<std::size_t>(b)].is_zero()) continue;
    try {
      ZPoly r = sylvester_resultant(kb[static_cast<std::size_t>(a)], kb[static_cast<std::size_t>(b)], {DeterminantMethod::kEvaluationInterpolation, workers});
      out = remove_shared(out, r);
    } catch (const PolynomialError&) {
    }
  }
  return out;
}

struct PassOutput {
  std::vector<CuspPoint> accepted;
  std::vector<CuspPoint> excluded;
  CuspDiagnostics diag;
  bool degenerate = false;
};

/// A tan-half root pair (t, t1) of the pass polynomials.
struct RootPair {
  double t;
  double t1;
  int multiplicity;
};

/// Real t1 roots of the resultant and, for each, the real t roots of the
/// singularity polynomial at an exact rational t1.
inline std::vector<RootPair> back_substitute(const QBiPoly& sing, const ZPoly& res, CuspDiagnostics& d) {
  std::vector<RootPair> out;
  auto roots = real_roots(to_rational(res));
  d.resultant_real_roots += static_cast<int>(roots.size());
  for (const auto& r : roots) {
    Rational t1q = (r.lower + r.upper) / 2;
    if (r.multiplicity > 1) ++d.repeated_roots;
    QPoly in_t = sing.at_t1<Rational>(t1q);
    if (in_t.degree() <= 0) continue;
    for (const auto& rt : real_roots(in_t)) out.push_back({rt.value, t1q.get_d(), r.multiplicity});
  }
  return out;
}

inline std::optional<CuspPoint> make_point(const ManipulatorGeometry& g, double l1, const RootPair& rp, bool shifted,
                                           double res_sing, double res_cusp) {
  auto [alpha, theta1] = unshift(2 * std::atan(rp.t), 2 * std::atan(rp.t1), shifted);
  Configuration c = config_from_slice(g, {l1, alpha, theta1});
  CuspPoint p;
  p.l1 = l1;
  p.alpha = alpha;
  p.theta1 = theta1;
  p.l2 = c.l(1);
  p.l3 = c.l(2);
  p.t = std::tan(alpha / 2);
  p.t1 = std::tan(theta1 / 2);
  p.residual_singular = res_sing;
  p.residual_cusp = res_cusp;
  p.excluded_axis = c.degenerate();
  p.multiplicity = rp.multiplicity;
  return p;
}

inline double gradient_scale(const TrigPoly& f, double a, double t1) { return std::max(f.eval_abs(a, t1), 1e-300); }

/// Fallback when the cusp polynomial shares a factor with the singularity
/// polynomial (the cusp condition degenerates on the whole curve): cusps are
/// the points where the singular curve is tangent to both leg-length level
/// sets, i.e. where the slice map restricted to the curve stops being an
/// immersion.
inline PassOutput tangency_pass(const ManipulatorGeometry& g, double l1, bool shifted, const SliceTrig& s,
                                const SlicePolynomial& sing, const CuspOptions& opt) {
  PassOutput out;
  out.diag.tangency_fallback = true;
  TrigPoly f2 = s.x2 * s.x2 + s.y2 * s.y2;
  TrigPoly f3 = s.x3 * s.x3 + s.y3 * s.y3;
  TrigPoly ga = sing.trig.diff_alpha(), gt = sing.trig.diff_theta1();
  TrigPoly w2 = ga * f2.diff_theta1() - gt * f2.diff_alpha();
  TrigPoly w3 = ga * f3.diff_theta1() - gt * f3.diff_alpha();
  SlicePolynomial pw2 = slice_polynomial(w2), pw3 = slice_polynomial(w3);
  ZPoly res;
  try {
    res = sylvester_resultant(sing.poly, pw2.poly, {DeterminantMethod::kEvaluationInterpolation, opt.workers});
  } catch (const CommonFactor&) {
    try {
      res = sylvester_resultant(sing.poly, pw3.poly, {DeterminantMethod::kEvaluationInterpolation, opt.workers});
      std::swap(pw2, pw3);
    } catch (const CommonFactor&) {
      out.degenerate = true;
      return out;
    }
  }
  out.diag.resultant_degree = res.degree();
  out.diag.square_free_degree = square_free_part(res).degree();
  out.diag.relevant_degree = relevant_factor(res, s, opt.workers).degree();
  for (const auto& rp : back_substitute(sing.poly, res, out.diag)) {
    ++out.diag.candidates;
    double r2 = pw2.poly.normalized(rp.t, rp.t1), r3 = pw3.poly.normalized(rp.t, rp.t1);
    if (r2 >= opt.residual_tol || r3 >= opt.residual_tol) {
      ++out.diag.rejected_residual;
      continue;
    }
    // self-crossings of the singular curve satisfy both conditions trivially
    double pa = 2 * std::atan(rp.t), p1 = 2 * std::atan(rp.t1);
    double gn = std::hypot(ga.eval(pa, p1), gt.eval(pa, p1));
    if (gn < 1e-7 * (gradient_scale(ga, pa, p1) + gradient_scale(gt, pa, p1))) {
      ++out.diag.rejected_spurious;
      continue;
    }
    auto p = make_point(g, l1, rp, shifted, sing.poly.normalized(rp.t, rp.t1),
                        std::max(r2, r3));
    if (p->excluded_axis) {
      ++out.diag.excluded_axis;
      out.excluded.push_back(*p);
    } else {
      out.accepted.push_back(*p);
    }
  }
  return out;
}

inline PassOutput cusp_pass(const ManipulatorGeometry& g, double l1, bool shifted, const CuspOptions& opt) {
  SliceTrig s = slice_trig(exact_geometry(g, opt.digits), decimal_rational(l1), shifted);
  SlicePolynomial sing = slice_polynomial(singularity_trig(s));
  SlicePolynomial cusp = slice_polynomial(cusp_trig(s));
  PassOutput out;
  auto fill_degrees = [&](CuspDiagnostics& d) {
    d.singular_degree_t = sing.poly.deg_t();
    d.singular_degree_t1 = sing.poly.deg_t1();
    d.cusp_degree_t = cusp.poly.deg_t();
    d.cusp_degree_t1 = cusp.poly.deg_t1();
  };
  if (sing.poly.is_zero()) {
    out.degenerate = true;
    return out;
  }
  ZPoly res;
  try {
    res = sylvester_resultant(sing.poly, cusp.poly, {DeterminantMethod::kEvaluationInterpolation, opt.workers});
  } catch (const CommonFactor&) {
    out = tangency_pass(g, l1, shifted, s, sing, opt);
    fill_degrees(out.diag);
    return out;
  } catch (const PolynomialError&) {
    // cusp polynomial identically zero
    out = tangency_pass(g, l1, shifted, s, sing, opt);
    fill_degrees(out.diag);
    return out;
  }
  fill_degrees(out.diag);
  out.diag.resultant_degree = res.degree();
  out.diag.square_free_degree = square_free_part(res).degree();
  out.diag.relevant_degree = relevant_factor(res, s, opt.workers).degree();
  for (const auto& rp : back_substitute(sing.poly, res, out.diag)) {
    ++out.diag.candidates;
    double rc = cusp.poly.normalized(rp.t, rp.t1);
    if (rc >= opt.residual_tol) {
      ++out.diag.rejected_residual;
      continue;
    }
    auto p = make_point(g, l1, rp, shifted, sing.poly.normalized(rp.t, rp.t1), rc);
    if (p->excluded_axis) {
      ++out.diag.excluded_axis;
      out.excluded.push_back(*p);
      continue;
    }
    // common zeros where a pair of k factors vanishes are not cusps
    CuspValue kv = normalized_cusp_scalar(g, config_from_slice(g, {l1, p->alpha, p->theta1}).state());
    if (kv.degenerate) {
      ++out.diag.degenerate_kernel;
      continue;
    }
    if (std::abs(kv.value) > opt.kernel_tol) {
      ++out.diag.rejected_spurious;
      continue;
    }
    out.accepted.push_back(*p);
  }
  return out;
}

inline bool same_point(const CuspPoint& a, const CuspPoint& b, double tol) {
  return angle_distance(a.alpha, b.alpha) < tol && angle_distance(a.theta1, b.theta1) < tol;
}

inline void canonicalize(std::vector<CuspPoint>& pts, double tol) {
  std::vector<CuspPoint> out;
  for (const auto& p : pts) {
    auto it = std::find_if(out.begin(), out.end(), [&](const CuspPoint& q) { return same_point(p, q, tol); });
    if (it == out.end())
      out.push_back(p);
    else if (p.residual_cusp < it->residual_cusp)
      *it = p;
  }
  std::sort(out.begin(), out.end(), [](const CuspPoint& a, const CuspPoint& b) {
    if (a.theta1 != b.theta1) return a.theta1 < b.theta1;
    return a.alpha < b.alpha;
  });
  pts = std::move(out);
}

}  // namespace detail

/// Cusp points of the slice L1 = l1, with elimination diagnostics. The
/// diagnostics describe the unshifted pass.
inline CuspReport analyze_cusps(const ManipulatorGeometry& g, double l1, const CuspOptions& opt = {}) {
  detail::require_positive_l1(l1);
  validate(g);
  CuspReport report;
  std::vector<detail::PassOutput> passes(opt.shifted_pass ? 2 : 1);
  for (std::size_t i = 0; i < passes.size(); ++i) passes[i] = detail::cusp_pass(g, l1, i == 1, opt);
  for (const auto& p : passes) {
    if (p.degenerate) throw DegenerateSlice("singularity and cusp conditions share a factor on this slice");
    report.cusps.insert(report.cusps.end(), p.accepted.begin(), p.accepted.end());
    report.excluded.insert(report.excluded.end(), p.excluded.begin(), p.excluded.end());
  }
  report.diagnostics = passes[0].diag;
  detail::canonicalize(report.cusps, opt.dedupe_tol);
  detail::canonicalize(report.excluded, opt.dedupe_tol);
  return report;
}

inline std::vector<CuspPoint> find_cusps(const ManipulatorGeometry& g, double l1, const CuspOptions& opt = {}) {
  return analyze_cusps(g, l1, opt).cusps;
}

/// Singularity polynomial of a slice (leg-vector form) evaluated in double
/// precision, with a gradient and a projection onto its zero set.
class SingularField {
 public:
  SingularField(const ManipulatorGeometry& g, double l1) : g_(g), l1_(l1), beta_(platform_angle(g)) {}

  double value(double a, double t1) const {
    LegVectors v = leg_vectors(g_, {l1_, a, t1}, beta_);
    const double c1 = std::cos(t1), s1 = std::sin(t1);
    return g_.a2x * v.y2 * (v.y3 * c1 - v.x3 * s1) + (g_.a3x * v.y3 - g_.a3y * v.x3) * (s1 * v.x2 - c1 * v.y2);
  }

  std::array<double, 2> gradient(double a, double t1) const {
    const double h = 1e-7;
    return {(value(a + h, t1) - value(a - h, t1)) / (2 * h), (value(a, t1 + h) - value(a, t1 - h)) / (2 * h)};
  }

  // Newton projection onto the curve along the gradient.
  void project(double& a, double& t1) const {
    for (int it = 0; it < 30; ++it) {
      double f = value(a, t1);
      auto gr = gradient(a, t1);
      double n2 = gr[0] * gr[0] + gr[1] * gr[1];
      if (n2 == 0) return;
      a -= f * gr[0] / n2;
      t1 -= f * gr[1] / n2;
      if (std::abs(f) < 1e-15 * std::sqrt(n2)) return;
    }
  }

  JointPoint image(double a, double t1) const { return config_from_slice(g_, {l1_, a, t1}, beta_).joint_point(); }
  double l1() const { return l1_; }
  double beta() const { return beta_; }

 private:
  ManipulatorGeometry g_;
  double l1_;
  double beta_;
};

struct VerifyOptions {
  /// Sample distances from the cusp, as fractions of the geometry scale.
  std::vector<double> epsilons{1e-2, 1e-3, 1e-4};
  double exponent_lo = 0.18;
  double exponent_hi = 0.48;
};

struct CuspVerdict {
  bool confirmed = false;
  std::vector<double> epsilons;
  /// Diameter in (alpha, theta1) of the three assembly modes nearest the
  /// cusp configuration, per epsilon (NaN when fewer than three modes exist).
  std::vector<double> diameters;
  /// Least-squares slope of log(diameter) against log(epsilon).
  double exponent = std::numeric_limits<double>::quiet_NaN();
  std::string diagnostic;
};

namespace detail {

struct CurveSample {
  double a, t1;
  JointPoint image;
};

// Walks from (a, t1) along the curve in direction `sign`, stopping once the
// image has moved `reach` along `axis` or after max_steps.
inline std::vector<CurveSample> walk_curve(const SingularField& w, double a, double t1, int sign, double step,
                                           int max_steps, const std::array<double, 2>& axis, double reach) {
  std::vector<CurveSample> out;
  JointPoint origin = w.image(a, t1);
  std::array<double, 2> prev_dir{0, 0};
  for (int i = 0; i < max_steps; ++i) {
    auto gr = w.gradient(a, t1);
    double n = std::hypot(gr[0], gr[1]);
    if (n == 0) break;
    std::array<double, 2> dir{-gr[1] / n * sign, gr[0] / n * sign};
    if (i > 0 && dir[0] * prev_dir[0] + dir[1] * prev_dir[1] < 0) dir = {-dir[0], -dir[1]};
    prev_dir = dir;
    a += step * dir[0];
    t1 += step * dir[1];
    w.project(a, t1);
    JointPoint p = w.image(a, t1);
    out.push_back({a, t1, p});
    if ((p.l2 - origin.l2) * axis[0] + (p.l3 - origin.l3) * axis[1] >= reach) break;
  }
  return out;
}

// Curve point whose image projects exactly `target` along the axis, by
// bisection on the arc between two consecutive walk samples.
inline std::optional<JointPoint> branch_point(const SingularField& w, const std::vector<CurveSample>& walk,
                                              const JointPoint& origin, const std::array<double, 2>& axis,
                                              double target) {
  auto proj = [&](const JointPoint& p) { return (p.l2 - origin.l2) * axis[0] + (p.l3 - origin.l3) * axis[1]; };
  for (std::size_t i = 1; i < walk.size(); ++i) {
    if (proj(walk[i - 1].image) <= target && proj(walk[i].image) >= target) {
      double lo = 0, hi = 1;
      JointPoint best = walk[i].image;
      for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (lo + hi);
        double a = walk[i - 1].a + m * (walk[i].a - walk[i - 1].a);
        double t1 = walk[i - 1].t1 + m * (walk[i].t1 - walk[i - 1].t1);
        w.project(a, t1);
        best = w.image(a, t1);
        if (proj(best) < target)
          lo = m;
        else
          hi = m;
      }
      return best;
    }
  }
  return std::nullopt;
}

inline double cluster_diameter(const std::vector<AssemblyMode>& modes, double alpha, double theta1) {
  if (modes.size() < 3) return std::numeric_limits<double>::quiet_NaN();
  auto dist = [](double a0, double t0, double a1, double t1) {
    return std::hypot(angle_distance(a0, a1), angle_distance(t0, t1));
  };
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < modes.size(); ++i) order.push_back({dist(modes[i].alpha, modes[i].theta1, alpha, theta1), i});
  std::sort(order.begin(), order.end());
  double d = 0;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 3; ++j) {
      const auto& x = modes[order[static_cast<std::size_t>(i)].second];
      const auto& y = modes[order[static_cast<std::size_t>(j)].second];
      d = std::max(d, dist(x.alpha, x.theta1, y.alpha, y.theta1));
    }
  return d;
}

}  // namespace detail

/// Numerical confirmation that three assembly modes coalesce at a cusp. The
/// joint-space image of the singular curve has zero speed at a cusp, so the
/// cusp axis is the second difference of the image. For each epsilon the
/// probe is the midpoint between the two branches at axial distance
/// epsilon * scale (inside the cusp wedge), plus probes in eight fixed
/// directions; the smallest three-mode cluster over the probes is kept.
inline CuspVerdict verify_cusp(const ManipulatorGeometry& g, const CuspPoint& c, const VerifyOptions& opt = {}) {
  CuspVerdict v;
  v.epsilons = opt.epsilons;
  const double scale = g.scale();
  SingularField w(g, c.l1);
  double a0 = c.alpha, t0 = c.theta1;
  w.project(a0, t0);
  JointPoint origin = w.image(a0, t0);

  // cusp axis from a symmetric second difference of the image
  const double s = 1e-3;
  auto gr = w.gradient(a0, t0);
  double gn = std::hypot(gr[0], gr[1]);
  if (gn == 0) {
    v.diagnostic = "singular curve has a vanishing gradient at the point";
    return v;
  }
  auto along = [&](double sign) {
    double a = a0 - sign * s * gr[1] / gn, t1 = t0 + sign * s * gr[0] / gn;
    w.project(a, t1);
    return w.image(a, t1);
  };
  JointPoint jp = along(1), jm = along(-1);
  std::array<double, 2> axis{jp.l2 + jm.l2 - 2 * origin.l2, jp.l3 + jm.l3 - 2 * origin.l3};
  double an = std::hypot(axis[0], axis[1]);
  if (an == 0) {
    v.diagnostic = "could not determine the cusp axis";
    return v;
  }
  axis = {axis[0] / an, axis[1] / an};

  double max_eps = *std::max_element(opt.epsilons.begin(), opt.epsilons.end());
  auto walk_p = detail::walk_curve(w, a0, t0, 1, 2e-4, 20000, axis, 1.05 * max_eps * scale);
  auto walk_m = detail::walk_curve(w, a0, t0, -1, 2e-4, 20000, axis, 1.05 * max_eps * scale);
  walk_p.insert(walk_p.begin(), {a0, t0, origin});
  walk_m.insert(walk_m.begin(), {a0, t0, origin});

  SliceSolver solver(g, c.l1);
  for (double eps : opt.epsilons) {
    const double r = eps * scale;
    std::vector<JointPoint> probes;
    auto bp = detail::branch_point(w, walk_p, origin, axis, r);
    auto bm = detail::branch_point(w, walk_m, origin, axis, r);
    if (bp && bm)
      probes.push_back({0.5 * (bp->l2 + bm->l2), 0.5 * (bp->l3 + bm->l3)});
    else
      probes.push_back({origin.l2 + r * axis[0], origin.l3 + r * axis[1]});
    for (int k = 0; k < 8; ++k) {
      double phi = k * std::numbers::pi / 4;
      probes.push_back({origin.l2 + r * std::cos(phi), origin.l3 + r * std::sin(phi)});
    }
    double best = std::numeric_limits<double>::quiet_NaN();
    for (const auto& p : probes) {
      if (p.l2 <= length_tolerance(g) || p.l3 <= length_tolerance(g)) continue;
      double d = detail::cluster_diameter(solver.modes(p.l2, p.l3), c.alpha, c.theta1);
      if (std::isnan(best) || d < best) best = d;
    }
    v.diameters.push_back(best);
  }

  bool decreasing = true;
  for (std::size_t i = 0; i < v.diameters.size(); ++i) {
    if (std::isnan(v.diameters[i]) || !(v.diameters[i] > 0)) {
      v.diagnostic = "fewer than three assembly modes near the point";
      return v;
    }
    if (i > 0 && !(v.diameters[i] < v.diameters[i - 1])) decreasing = false;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(v.diameters.size());
  for (std::size_t i = 0; i < v.diameters.size(); ++i) {
    double x = std::log(opt.epsilons[i]), y = std::log(v.diameters[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  v.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  if (!decreasing)
    v.diagnostic = "cluster diameter does not shrink with epsilon";
  else if (v.exponent < opt.exponent_lo || v.exponent > opt.exponent_hi)
    v.diagnostic = "fitted exponent outside the accepted band";
  else
    v.confirmed = true;
  return v;
}

}  // namespace rpr
