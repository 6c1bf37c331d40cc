#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <vector>

#include "rpr/atlas.hpp"
#include "support.hpp"

using namespace rpr;

namespace {

double segment_distance(double px, double py, double qx, double qy, double ax, double ay, double bx, double by) {
  auto point_seg = [](double x, double y, double x0, double y0, double x1, double y1) {
    const double dx = x1 - x0, dy = y1 - y0, len2 = dx * dx + dy * dy;
    double f = len2 > 0 ? ((x - x0) * dx + (y - y0) * dy) / len2 : 0.0;
    f = std::clamp(f, 0.0, 1.0);
    return std::hypot(x - x0 - f * dx, y - y0 - f * dy);
  };
  auto cross = [](double ax, double ay, double bx, double by, double cx, double cy) {
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax);
  };
  const double d1 = cross(px, py, qx, qy, ax, ay), d2 = cross(px, py, qx, qy, bx, by);
  const double d3 = cross(ax, ay, bx, by, px, py), d4 = cross(ax, ay, bx, by, qx, qy);
  if (((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0))) return 0.0;
  return std::min({point_seg(ax, ay, px, py, qx, qy), point_seg(bx, by, px, py, qx, qy),
                   point_seg(px, py, ax, ay, bx, by), point_seg(qx, qy, ax, ay, bx, by)});
}

double distance_to_curves(const std::vector<SingularCurve>& curves, double px, double py, double qx, double qy) {
  double best = INFINITY;
  for (const auto& c : curves)
    for (std::size_t k = 0; k < c.samples.size(); ++k) {
      const auto& a = c.samples[k];
      const auto& b = c.samples[(k + 1) % c.samples.size()];
      best = std::min(best, segment_distance(px, py, qx, qy, a.l2, a.l3, b.l2, b.l3));
    }
  return best;
}

std::vector<int> cusp_counts(const std::vector<SliceSummary>& s) {
  std::vector<int> out;
  for (const auto& x : s) out.push_back(x.cusp_count);
  return out;
}

}  // namespace

TEST(TraceCurves, SamplesLieOnTheSingularSet) {
  auto g = test::reference_geometry();
  const double l1 = 14.98;
  auto curves = trace_singular_curves(g, l1);
  ASSERT_FALSE(curves.empty());
  auto s = singularity_polynomial(g, l1);
  const double beta = platform_angle(g);
  const double step = 2 * std::numbers::pi / 512;
  for (const auto& c : curves) {
    ASSERT_GE(c.samples.size(), 3u);
    for (std::size_t k = 0; k < c.samples.size(); ++k) {
      const auto& p = c.samples[k];
      const auto& q = c.samples[(k + 1) % c.samples.size()];
      EXPECT_LT(std::abs(s.trig.eval(p.alpha, p.theta1)) / s.trig.eval_abs(p.alpha, p.theta1), 1e-6);
      EXPECT_LT(std::hypot(angle_distance(p.alpha, q.alpha), angle_distance(p.theta1, q.theta1)), 2 * step);
      JointPoint jp = config_from_slice(g, {l1, p.alpha, p.theta1}, beta).joint_point();
      EXPECT_NEAR(jp.l2, p.l2, 1e-12 * g.scale());
      EXPECT_NEAR(jp.l3, p.l3, 1e-12 * g.scale());
    }
  }
}

TEST(TraceCurves, SmallSliceHasTwoClosedBranches) {
  auto curves = trace_singular_curves(test::reference_geometry(), 0.05);
  EXPECT_EQ(curves.size(), 2u);
}

TEST(TraceCurves, RefinementKeepsBranches) {
  auto g = test::reference_geometry();
  for (double l1 : {2.0, 14.98, 31.0}) {
    auto coarse = trace_singular_curves(g, l1, 512, 512);
    auto fine = trace_singular_curves(g, l1, 1024, 1024);
    ASSERT_EQ(coarse.size(), fine.size()) << l1;
    const double step = 2 * std::numbers::pi / 512;
    for (const auto& c : coarse)
      for (std::size_t k = 0; k < c.samples.size(); k += 16) {
        const auto& p = c.samples[k];
        double best = INFINITY;
        for (const auto& f : fine)
          for (const auto& q : f.samples)
            best = std::min(best, std::hypot(angle_distance(p.alpha, q.alpha), angle_distance(p.theta1, q.theta1)));
        EXPECT_LT(best, step) << l1;
      }
  }
}

TEST(TraceCurves, RejectsCoarseGrid) {
  EXPECT_THROW(trace_singular_curves(test::reference_geometry(), 14.98, 32, 512), Error);
}

TEST(RegionMap, UnreachableWindowIsEmpty) {
  auto g = test::reference_geometry();
  auto r = region_map(g, 14.98, {200, 210, 200, 210}, 32, 32);
  for (int v : r.counts) EXPECT_EQ(v, 0);
}

TEST(RegionMap, RejectsWindowTouchingZero) {
  auto g = test::reference_geometry();
  EXPECT_THROW(region_map(g, 14.98, {0, 10, 1, 10}, 8, 8, {}), Error);
}

TEST(RegionMap, CentralSliceHasTwoFourAndSixModeRegions) {
  auto g = test::reference_geometry();
  auto a = slice_atlas(g, 14.98);
  EXPECT_EQ(a.cusp_count, 6);
  EXPECT_TRUE(a.warnings.empty()) << a.warnings.front();
  EXPECT_GT(a.side_checks, 20);
  for (int n : {2, 4, 6}) EXPECT_GE(a.signature[n], 1) << n;
  for (int v : a.regions.counts) {
    EXPECT_LE(v, 6);
    if (v >= 0) {
      EXPECT_EQ(v % 2, 0);
    }
  }
  // spot checks away from curve cells
  SliceSolver solver(g, 14.98);
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<int> i2(2, a.regions.n2 - 3), i3(2, a.regions.n3 - 3);
  int checked = 0;
  while (checked < 300) {
    const int i = i2(rng), j = i3(rng);
    bool clear = true;
    for (int di = -2; di <= 2; ++di)
      for (int dj = -2; dj <= 2; ++dj)
        if (a.regions.at(i + di, j + dj) < 0) clear = false;
    if (!clear) continue;
    EXPECT_EQ(a.regions.at(i, j), solver.count(a.regions.cell_l2(i), a.regions.cell_l3(j)));
    ++checked;
  }
}

TEST(RegionMap, CountsChangeOnlyAcrossCurves) {
  auto g = test::reference_geometry();
  const double l1 = 14.98;
  auto curves = trace_singular_curves(g, l1);
  SliceSolver solver(g, l1);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> len(1.0, 50.0);
  for (int s = 0; s < 20; ++s) {
    const double x0 = len(rng), y0 = len(rng), x1 = len(rng), y1 = len(rng);
    const int n = 400;
    int prev = solver.count(x0, y0);
    for (int k = 1; k <= n; ++k) {
      const double f0 = static_cast<double>(k - 1) / n, f1 = static_cast<double>(k) / n;
      const double px = x0 + f0 * (x1 - x0), py = y0 + f0 * (y1 - y0);
      const double qx = x0 + f1 * (x1 - x0), qy = y0 + f1 * (y1 - y0);
      const int cur = solver.count(qx, qy);
      if (cur != prev) {
        EXPECT_EQ((cur - prev) % 2, 0);
        EXPECT_LT(distance_to_curves(curves, px, py, qx, qy), 1e-2) << px << "," << py << " -> " << qx << "," << qy;
      }
      prev = cur;
    }
  }
}

TEST(SliceAtlas, LargeSliceHasEnclosedFourModeRegion) {
  auto a = slice_atlas(test::reference_geometry(), 31.0);
  EXPECT_EQ(a.cusp_count, 4);
  EXPECT_EQ(enclosed_regions(a.regions, 4, 2), 1);
  EXPECT_EQ(a.signature[4], 1);
  EXPECT_TRUE(a.warnings.empty());
}

TEST(SliceAtlas, CuspsLieOnTracedCurves) {
  auto g = test::reference_geometry();
  auto a = slice_atlas(g, 2.8);
  EXPECT_EQ(a.cusp_count, 4);
  const double step = 2 * std::numbers::pi / 512;
  for (const auto& c : a.cusps) {
    double best = INFINITY;
    for (const auto& curve : a.curves)
      for (const auto& p : curve.samples)
        best = std::min(best, std::hypot(angle_distance(p.alpha, c.alpha), angle_distance(p.theta1, c.theta1)));
    EXPECT_LT(best, step);
  }
}

TEST(SliceAtlas, RefinementKeepsSummary) {
  auto g = test::reference_geometry();
  AtlasOptions fine;
  fine.n_alpha = fine.n_theta = 1024;
  fine.n2 = fine.n3 = 2048;
  for (double l1 : {2.0, 31.0}) {
    auto a = slice_atlas(g, l1), b = slice_atlas(g, l1, fine);
    EXPECT_EQ(a.cusp_count, b.cusp_count) << l1;
    EXPECT_EQ(a.signature, b.signature) << l1;
  }
}

TEST(Sweep, ReferenceCuspCounts) {
  auto s = sweep(test::reference_geometry(), {0.05, 2, 2.8, 6, 8, 26, 29, 31});
  EXPECT_EQ(cusp_counts(s), (std::vector<int>{0, 2, 4, 6, 6, 6, 6, 4}));
  EXPECT_EQ(s[2].l1, 2.8);
}

TEST(Sweep, SecondGeometryPatternSettles) {
  auto s = sweep(test::second_geometry(), {5, 20});
  EXPECT_EQ(s[0], s[1]);
  EXPECT_EQ(s[0].cusp_count, 4);
}

TEST(Sweep, Repeatable) {
  auto g = test::second_geometry();
  AtlasOptions one;
  one.workers = 1;
  auto a = sweep(g, {3, 7}), b = sweep(g, {3, 7}, one);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a[0].signature, b[0].signature);
}

TEST(Sweep, RejectsNonPositiveSlice) { EXPECT_THROW(sweep(test::reference_geometry(), {1.0, 0.0}), Error); }

TEST(Stabilization, StableSuffix) {
  auto mk = [](int c) { return SliceSummary{0, c, {{2, 1}}}; };
  EXPECT_EQ(stable_from({mk(1), mk(1), mk(1)}), std::optional<std::size_t>(0));
  EXPECT_EQ(stable_from({mk(2), mk(1), mk(1)}), std::optional<std::size_t>(1));
  EXPECT_EQ(stable_from({mk(1), mk(2)}), std::nullopt);
  EXPECT_EQ(stable_from({mk(1)}), std::optional<std::size_t>(0));
}

TEST(Stabilization, SampleRange) {
  auto r = sample_range(0.5, 20, 0.5);
  ASSERT_EQ(r.size(), 40u);
  EXPECT_DOUBLE_EQ(r.back(), 20.0);
  EXPECT_THROW(sample_range(1, 2, 0), Error);
  EXPECT_THROW(sample_range(2, 1, 0.5), Error);
}

TEST(Stabilization, SecondGeometry) {
  auto v = find_stabilization(test::second_geometry(), 0.5, 20, 0.5);
  ASSERT_TRUE(v.has_value());
  EXPECT_LE(*v, 5.0);
}

TEST(Stabilization, ReferenceGeometry) {
  auto v = find_stabilization(test::reference_geometry(), 20, 40, 1);
  ASSERT_TRUE(v.has_value());
  EXPECT_LE(*v, 31.0);
}
