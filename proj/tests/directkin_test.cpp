#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "rpr/directkin.hpp"
#include "support.hpp"

using namespace rpr;

namespace {

struct Angles {
  double alpha;
  double theta1;
};

// Levenberg-Marquardt on the two closure equations from a grid of starts.
std::vector<Angles> multistart(const ManipulatorGeometry& g, double l1, double l2, double l3, int n = 24) {
  const double beta = platform_angle(g);
  auto residual = [&](double a, double t) {
    JointPoint p = config_from_slice(g, {l1, a, t}, beta).joint_point();
    return std::array<double, 2>{p.l2 * p.l2 - l2 * l2, p.l3 * p.l3 - l3 * l3};
  };
  std::vector<Angles> roots;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double a = -std::numbers::pi + (i + 0.5) * 2 * std::numbers::pi / n;
      double t = -std::numbers::pi + (j + 0.5) * 2 * std::numbers::pi / n;
      double mu = 1e-3;
      auto r = residual(a, t);
      for (int it = 0; it < 200; ++it) {
        const double h = 1e-7;
        auto ra = residual(a + h, t), rt = residual(a, t + h);
        const double j00 = (ra[0] - r[0]) / h, j01 = (rt[0] - r[0]) / h, j10 = (ra[1] - r[1]) / h, j11 = (rt[1] - r[1]) / h;
        const double s = std::max({std::abs(j00), std::abs(j01), std::abs(j10), std::abs(j11), 1e-300});
        const double a00 = j00 * j00 + j10 * j10 + mu * s * s, a01 = j00 * j01 + j10 * j11, a11 = j01 * j01 + j11 * j11 + mu * s * s;
        const double b0 = j00 * r[0] + j10 * r[1], b1 = j01 * r[0] + j11 * r[1];
        const double det = a00 * a11 - a01 * a01;
        const double da = -(a11 * b0 - a01 * b1) / det, dt = -(a00 * b1 - a01 * b0) / det;
        auto rn = residual(a + da, t + dt);
        if (std::hypot(rn[0], rn[1]) < std::hypot(r[0], r[1])) {
          a += da, t += dt, r = rn;
          mu = std::max(mu / 3, 1e-12);
        } else {
          mu *= 4;
        }
        if (std::hypot(r[0], r[1]) < 1e-12 * (l2 * l2 + l3 * l3)) break;
      }
      if (std::hypot(r[0], r[1]) > 1e-9 * (l2 * l2 + l3 * l3)) continue;
      a = normalize_angle(a), t = normalize_angle(t);
      bool dup = false;
      for (const auto& q : roots)
        if (angle_distance(q.alpha, a) < 1e-5 && angle_distance(q.theta1, t) < 1e-5) dup = true;
      if (!dup) roots.push_back({a, t});
    }
  return roots;
}

double min_separation(const std::vector<Angles>& r) {
  double d = INFINITY;
  for (std::size_t i = 0; i < r.size(); ++i)
    for (std::size_t j = i + 1; j < r.size(); ++j)
      d = std::min(d, std::hypot(angle_distance(r[i].alpha, r[j].alpha), angle_distance(r[i].theta1, r[j].theta1)));
  return d;
}

}  // namespace

TEST(SliceSolver, SixModesInsideCentralRegion) {
  auto g = test::reference_geometry();
  SliceSolver s(g, 14.98);
  auto modes = s.modes(21.4, 19.8);
  ASSERT_EQ(modes.size(), 6u);
  EXPECT_EQ(s.count(21.4, 19.8), 6);
  for (const auto& m : modes) {
    EXPECT_LT(m.residual, 1e-9);
    EXPECT_NEAR(m.config.l(0), 14.98, 1e-9);
    EXPECT_NEAR(m.config.l(1), 21.4, 1e-9);
    EXPECT_NEAR(m.config.l(2), 19.8, 1e-9);
  }
  for (std::size_t i = 1; i < modes.size(); ++i) EXPECT_LE(modes[i - 1].theta1, modes[i].theta1);
}

TEST(SliceSolver, KnownCounts) {
  SliceSolver s(test::reference_geometry(), 14.98);
  EXPECT_EQ(s.count(30.2, 15.8), 4);
  EXPECT_EQ(s.count(39.8, 39.8), 2);
  EXPECT_EQ(s.count(39.8, 20.6), 0);
}

TEST(SliceSolver, UnreachableLengthsGiveNothing) {
  auto g = test::reference_geometry();
  SliceSolver s(g, 14.98);
  EXPECT_TRUE(s.modes(500.0, 1.0).empty());
  EXPECT_TRUE(s.modes(39.8, 20.6).empty());
  EXPECT_EQ(count_assembly_modes(g, {14.98, 500.0, 1.0}), 0);
}

TEST(SliceSolver, NonPositiveLengthThrows) {
  SliceSolver s(test::reference_geometry(), 14.98);
  EXPECT_THROW(s.count(0.0, 10.0), DegenerateConfiguration);
  EXPECT_THROW(s.modes(10.0, -1.0), DegenerateConfiguration);
}

TEST(SliceSolver, RoundTripRecoversPose) {
  std::mt19937_64 rng(21);
  for (auto g : {test::reference_geometry(), test::second_geometry()}) {
    const double beta = platform_angle(g);
    const double lo = 0.2 * g.scale(), hi = 1.5 * g.scale();
    for (int k = 0; k < 60; ++k) {
      SlicePose p = test::random_pose(rng, lo, hi);
      Configuration c = config_from_slice(g, p, beta);
      if (c.degenerate()) continue;
      auto modes = SliceSolver(g, p.l1).modes(c.l(1), c.l(2));
      bool found = false;
      for (const auto& m : modes)
        if (angle_distance(m.alpha, p.alpha) < 1e-7 && angle_distance(m.theta1, p.theta1) < 1e-7) found = true;
      EXPECT_TRUE(found) << "l1=" << p.l1 << " alpha=" << p.alpha << " theta1=" << p.theta1;
    }
  }
}

TEST(SliceSolver, CountsAreEvenAndMatchModes) {
  auto g = test::reference_geometry();
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> len(0.5, 60.0);
  for (double l1 : {2.0, 14.98, 31.0}) {
    SliceSolver s(g, l1);
    for (int k = 0; k < 300; ++k) {
      const double l2 = len(rng), l3 = len(rng);
      const int n = s.count(l2, l3);
      EXPECT_EQ(n % 2, 0);
      EXPECT_LE(n, 6);
      EXPECT_EQ(static_cast<std::size_t>(n), s.modes(l2, l3).size());
    }
  }
}

TEST(SliceSolver, AgreesWithMultistartSolve) {
  auto g = test::reference_geometry();
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> len(1.0, 50.0);
  int compared = 0;
  for (int k = 0; k < 100; ++k) {
    const double l2 = len(rng), l3 = len(rng);
    auto slow = multistart(g, 14.98, l2, l3);
    if (min_separation(slow) < 1e-3) continue;  // too close to a singular curve to separate reliably
    auto fast = SliceSolver(g, 14.98).modes(l2, l3);
    ASSERT_EQ(fast.size(), slow.size()) << l2 << " " << l3;
    for (const auto& s : slow) {
      bool found = false;
      for (const auto& m : fast)
        if (angle_distance(m.alpha, s.alpha) < 1e-6 && angle_distance(m.theta1, s.theta1) < 1e-6) found = true;
      EXPECT_TRUE(found);
    }
    ++compared;
  }
  EXPECT_GE(compared, 90);
}

TEST(SliceSolver, FreeFunctionsAgree) {
  auto g = test::reference_geometry();
  auto a = assembly_modes(g, {14.98, 21.4, 19.8});
  auto b = SliceSolver(g, 14.98).modes(21.4, 19.8);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].alpha, b[i].alpha);
}
