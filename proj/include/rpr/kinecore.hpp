#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Dense>

#include "rpr/error.hpp"
#include "rpr/geometry.hpp"

namespace rpr {

using JacobianMatrix = Eigen::Matrix3d;

struct HessianTriple {
  std::array<Eigen::Matrix3d, 3> h;
  const Eigen::Matrix3d& operator[](std::size_t i) const { return h[i]; }
};

struct KFactors {
  double k1 = 0, k2 = 0, k3 = 0, k4 = 0, k5 = 0, k6 = 0;

  double max_abs() const {
    return std::max({std::abs(k1), std::abs(k2), std::abs(k3), std::abs(k4), std::abs(k5), std::abs(k6)});
  }
  /// The Jacobian rebuilt from the factors: [[k6, k5, 0], [0, k1, k3], [k4, 0, k2]].
  JacobianMatrix matrix() const {
    JacobianMatrix m;
    m << k6, k5, 0, 0, k1, k3, k4, 0, k2;
    return m;
  }
  double determinant() const { return k1 * k2 * k6 + k3 * k4 * k5; }
};

namespace detail {

struct Trig {
  double c[3], s[3];
  explicit Trig(const LegState& st) {
    for (int i = 0; i < 3; ++i) {
      c[i] = std::cos(st.angles[static_cast<std::size_t>(i)]);
      s[i] = std::sin(st.angles[static_cast<std::size_t>(i)]);
    }
  }
  // sin(th_i - th_j), cos(th_i - th_j), zero-based indices
  double sd(int i, int j) const { return s[i] * c[j] - c[i] * s[j]; }
  double cd(int i, int j) const { return c[i] * c[j] + s[i] * s[j]; }
};

inline void require_nondegenerate(const Configuration& c) {
  if (c.degenerate()) throw DegenerateConfiguration("leg length below tolerance; leg angle is undefined");
}

}  // namespace detail

/// dGamma/dtheta for an arbitrary (L, theta) tuple.
inline JacobianMatrix constraint_jacobian(const ManipulatorGeometry& g, const LegState& st) {
  detail::Trig t(st);
  const double L1 = st.lengths[0], L2 = st.lengths[1], L3 = st.lengths[2];
  const double a2x = g.a2x, a3x = g.a3x, a3y = g.a3y;
  JacobianMatrix m;
  m(0, 0) = L1 * (a2x * t.s[0] + L2 * t.sd(0, 1));
  m(0, 1) = L2 * (L1 * t.sd(1, 0) - a2x * t.s[1]);
  m(0, 2) = 0;
  m(1, 0) = 0;
  m(1, 1) = -L2 * ((a2x - a3x) * t.s[1] - L3 * t.sd(1, 2) + a3y * t.c[1]);
  m(1, 2) = L3 * ((a2x - a3x) * t.s[2] - L2 * t.sd(1, 2) + a3y * t.c[2]);
  m(2, 0) = L1 * (a3x * t.s[0] - L3 * t.sd(2, 0) - a3y * t.c[0]);
  m(2, 1) = 0;
  m(2, 2) = -L3 * (a3x * t.s[2] - L1 * t.sd(2, 0) - a3y * t.c[2]);
  return 2.0 * m;
}

inline JacobianMatrix constraint_jacobian(const ManipulatorGeometry& g, const Configuration& c) {
  detail::require_nondegenerate(c);
  return constraint_jacobian(g, c.state());
}

/// Second derivatives d2Gamma_i/dtheta2.
inline HessianTriple constraint_hessians(const ManipulatorGeometry& g, const LegState& st) {
  detail::Trig t(st);
  const double L1 = st.lengths[0], L2 = st.lengths[1], L3 = st.lengths[2];
  const double a2x = g.a2x, a3x = g.a3x, a3y = g.a3y;
  const double c21 = t.cd(1, 0), c23 = t.cd(1, 2), c31 = t.cd(2, 0);
  HessianTriple h;
  h.h[0] << L1 * (a2x * t.c[0] + L2 * c21), -L1 * L2 * c21, 0,
      -L1 * L2 * c21, -L2 * (a2x * t.c[1] - L1 * c21), 0,
      0, 0, 0;
  h.h[1] << 0, 0, 0,
      0, -L2 * ((a2x - a3x) * t.c[1] - L3 * c23 - a3y * t.s[1]), -L2 * L3 * c23,
      0, -L2 * L3 * c23, L3 * ((a2x - a3x) * t.c[2] + L2 * c23 - a3y * t.s[2]);
  h.h[2] << L1 * (a3x * t.c[0] + L3 * c31 + a3y * t.s[0]), 0, -L1 * L3 * c31,
      0, 0, 0,
      -L1 * L3 * c31, 0, L3 * (L1 * c31 - a3x * t.c[2] - a3y * t.s[2]);
  for (auto& m : h.h) m *= 2.0;
  return h;
}

inline HessianTriple constraint_hessians(const ManipulatorGeometry& g, const Configuration& c) {
  detail::require_nondegenerate(c);
  return constraint_hessians(g, c.state());
}

inline KFactors k_factors(const ManipulatorGeometry& g, const LegState& st) {
  detail::Trig t(st);
  const double L1 = st.lengths[0], L2 = st.lengths[1], L3 = st.lengths[2];
  const double a2x = g.a2x, a3x = g.a3x, a3y = g.a3y;
  const double s23 = t.sd(1, 2), s13 = t.sd(0, 2), s12 = t.sd(0, 1);
  KFactors k;
  k.k1 = 2 * L2 * ((a3x - a2x) * t.s[1] + L3 * s23 - a3y * t.c[1]);
  k.k2 = -2 * L3 * (L1 * s13 + a3x * t.s[2] - a3y * t.c[2]);
  k.k3 = -2 * L3 * ((a3x - a2x) * t.s[2] + L2 * s23 - a3y * t.c[2]);
  k.k4 = 2 * L1 * (L3 * s13 + a3x * t.s[0] - a3y * t.c[0]);
  k.k5 = -2 * L2 * (L1 * s12 + a2x * t.s[1]);
  k.k6 = 2 * L1 * (L2 * s12 + a2x * t.s[0]);
  return k;
}

inline KFactors k_factors(const ManipulatorGeometry& g, const Configuration& c) { return k_factors(g, c.state()); }

/// Adjugate of the structured Jacobian from cofactors, so adj * J = det * I.
inline Eigen::Matrix3d adjugate(const KFactors& k) {
  Eigen::Matrix3d a;
  a << k.k1 * k.k2, -k.k2 * k.k5, k.k3 * k.k5,
      k.k3 * k.k4, k.k2 * k.k6, -k.k3 * k.k6,
      -k.k1 * k.k4, k.k4 * k.k5, k.k1 * k.k6;
  return a;
}

/// Adjugate of a general 3x3 matrix.
inline Eigen::Matrix3d adjugate(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      int r0 = (j + 1) % 3, r1 = (j + 2) % 3, c0 = (i + 1) % 3, c1 = (i + 2) % 3;
      a(i, j) = m(r0, c0) * m(r1, c1) - m(r0, c1) * m(r1, c0);
    }
  return a;
}

struct KernelVectors {
  Eigen::Vector3d u = Eigen::Vector3d::Zero();  // left kernel (adjugate row)
  Eigen::Vector3d v = Eigen::Vector3d::Zero();  // right kernel (adjugate column)
  int row = -1;
  int column = -1;
  bool degenerate = true;
};

enum class KernelSelection {
  kFirst,    // first row / column whose norm clears the rank threshold
  kLargest,  // row / column of largest norm
};

inline KernelVectors kernel_vectors(const KFactors& k, KernelSelection sel = KernelSelection::kFirst) {
  const Eigen::Matrix3d a = adjugate(k);
  const double m = k.max_abs();
  const double eps = 1e-10 * m * m;
  KernelVectors out;
  auto pick = [&](auto norm_of) {
    int best = -1;
    double best_norm = 0;
    for (int i = 0; i < 3; ++i) {
      double n = norm_of(i);
      if (n < eps || n == 0) continue;
      if (sel == KernelSelection::kFirst) return i;
      if (n > best_norm) best = i, best_norm = n;
    }
    return best;
  };
  out.column = pick([&](int i) { return a.col(i).norm(); });
  out.row = pick([&](int i) { return a.row(i).norm(); });
  if (out.column >= 0) out.v = a.col(out.column);
  if (out.row >= 0) out.u = a.row(out.row).transpose();
  out.degenerate = out.column < 0 || out.row < 0;
  return out;
}

inline double singularity_scalar(const ManipulatorGeometry& g, const LegState& st) {
  detail::Trig t(st);
  return g.a2x * t.s[1] * t.sd(2, 0) + (g.a3x * t.s[2] - g.a3y * t.c[2]) * t.sd(0, 1);
}

inline double singularity_scalar(const ManipulatorGeometry& g, const Configuration& c) {
  return singularity_scalar(g, c.state());
}

struct CuspValue {
  double value = 0;
  bool degenerate = false;
};

inline double quadratic_form(const HessianTriple& h, const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
  Eigen::Matrix3d m = u(0) * h[0] + u(1) * h[1] + u(2) * h[2];
  return v.dot(m * v);
}

inline CuspValue cusp_scalar(const ManipulatorGeometry& g, const LegState& st,
                             KernelSelection sel = KernelSelection::kFirst) {
  KernelVectors kv = kernel_vectors(k_factors(g, st), sel);
  if (kv.degenerate) return {0.0, true};
  return {quadratic_form(constraint_hessians(g, st), kv.u, kv.v), false};
}

inline CuspValue cusp_scalar(const ManipulatorGeometry& g, const Configuration& c,
                             KernelSelection sel = KernelSelection::kFirst) {
  detail::require_nondegenerate(c);
  return cusp_scalar(g, c.state(), sel);
}

/// Scale-free cusp value: the quadratic form over |u| |v|^2 |H|, with the
/// largest adjugate row and column. Comparable against fixed thresholds.
inline CuspValue normalized_cusp_scalar(const ManipulatorGeometry& g, const LegState& st) {
  KernelVectors kv = kernel_vectors(k_factors(g, st), KernelSelection::kLargest);
  if (kv.degenerate) return {0.0, true};
  HessianTriple h = constraint_hessians(g, st);
  double hn = std::max({h[0].norm(), h[1].norm(), h[2].norm()});
  double den = kv.u.norm() * kv.v.squaredNorm() * hn;
  if (den == 0) return {0.0, true};
  return {quadratic_form(h, kv.u, kv.v) / den, false};
}

}  // namespace rpr
