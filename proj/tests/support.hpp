#pragma once

#include <numbers>
#include <random>

#include "rpr/geometry.hpp"

namespace rpr::test {

inline ManipulatorGeometry reference_geometry() {
  ManipulatorGeometry g;
  g.a2x = 15.91;
  g.a3x = 0.0;
  g.a3y = 10.0;
  g.d1 = 17.04;
  g.d2 = 16.54;
  g.d3 = 20.84;
  g.beta_sign = 1;
  return g;
}

// collinear platform: d1 = d2 + d3
inline ManipulatorGeometry second_geometry() {
  ManipulatorGeometry g;
  g.a2x = 3.0;
  g.a3x = 1.1;
  g.a3y = 2.7;
  g.d1 = 1.3;
  g.d2 = 0.9;
  g.d3 = 0.4;
  g.allow_collinear = true;
  return g;
}

inline SlicePose random_pose(std::mt19937_64& rng, double l1_lo = 2.0, double l1_hi = 30.0) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> len(l1_lo, l1_hi);
  return {len(rng), ang(rng), ang(rng)};
}

inline LegState random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> len(1.0, 30.0);
  LegState s;
  for (int i = 0; i < 3; ++i) {
    s.lengths[static_cast<std::size_t>(i)] = len(rng);
    s.angles[static_cast<std::size_t>(i)] = ang(rng);
  }
  return s;
}

}  // namespace rpr::test
