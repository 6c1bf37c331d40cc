#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "rpr/cuspfind.hpp"
#include "rpr/directkin.hpp"
#include "rpr/geometry.hpp"
#include "rpr/parallel.hpp"

namespace rpr {

struct CurvePoint {
  double alpha = 0;
  double theta1 = 0;
  double l2 = 0;
  double l3 = 0;
};

/// One closed branch of the singular set on the (alpha, theta1) torus.
struct SingularCurve {
  int branch_id = 0;
  std::vector<CurvePoint> samples;
};

struct Window {
  double l2min = 0, l2max = 0, l3min = 0, l3max = 0;
};

/// Assembly-mode counts at cell centres; -1 marks cells on a singular curve
/// or where the count is undefined. counts[i2 + n2 * i3]. faces is the number
/// of curve-bounded pieces; recounted_faces those whose spot checks disagreed.
struct RegionGrid {
  Window window;
  int n2 = 0;
  int n3 = 0;
  std::vector<int> counts;
  int faces = 0;
  int recounted_faces = 0;

  int at(int i2, int i3) const { return counts[static_cast<std::size_t>(i2 + n2 * i3)]; }
  double cell_l2(int i2) const { return window.l2min + (i2 + 0.5) * (window.l2max - window.l2min) / n2; }
  double cell_l3(int i3) const { return window.l3min + (i3 + 0.5) * (window.l3max - window.l3min) / n3; }
};

/// For each nonzero count, the number of connected regions carrying it.
/// Unreachable cells are left out: how they split depends on the window.
using RegionSignature = std::map<int, int>;

struct AtlasOptions {
  int n_alpha = 512;
  int n_theta = 512;
  int n2 = 1024;
  int n3 = 1024;
  std::optional<Window> window;
  /// Regions with fewer cells are treated as raster noise.
  int min_region_cells = 8;
  unsigned workers = 0;
  CuspOptions cusp;
};

struct SliceAtlas {
  double l1 = 0;
  std::vector<SingularCurve> curves;
  std::vector<CuspPoint> cusps;
  CuspDiagnostics cusp_diagnostics;
  RegionGrid regions;
  int cusp_count = 0;
  RegionSignature signature;
  int side_checks = 0;
  /// Violated cross-checks between curves, cusps and regions (empty when consistent).
  std::vector<std::string> warnings;
};

namespace detail {

inline double grid_angle(int i, int n) { return -std::numbers::pi + 2 * std::numbers::pi * i / n; }

}  // namespace detail

/// Marching squares over the periodic (alpha, theta1) grid. Saddle cells are
/// resolved by the sign at the cell centre; each edge crossing is refined by
/// bisection. Branches are ordered by their smallest edge index.
inline std::vector<SingularCurve> trace_singular_curves(const ManipulatorGeometry& g, double l1, int n_alpha = 512,
                                                        int n_theta = 512, unsigned workers = 0) {
  if (n_alpha < 64 || n_theta < 64) throw Error("curve grid must be at least 64 x 64");
  detail::require_positive_l1(l1);
  SingularField field(g, l1);
  const int na = n_alpha, nt = n_theta;
  std::vector<double> v(static_cast<std::size_t>(na) * static_cast<std::size_t>(nt));
  parallel_for(static_cast<std::size_t>(nt), workers, [&](std::size_t j) {
    const double th = detail::grid_angle(static_cast<int>(j), nt);
    for (int i = 0; i < na; ++i) v[static_cast<std::size_t>(i) + static_cast<std::size_t>(na) * j] = field.value(detail::grid_angle(i, na), th);
  });
  auto idx = [&](int i, int j) { return static_cast<std::size_t>(((i % na) + na) % na) + static_cast<std::size_t>(na) * static_cast<std::size_t>(((j % nt) + nt) % nt); };
  auto pos = [&](int i, int j) { return v[idx(i, j)] > 0; };
  // edge ids: 2*(i + na*j) horizontal (i,j)-(i+1,j); +1 vertical (i,j)-(i,j+1)
  auto hedge = [&](int i, int j) { return static_cast<std::int64_t>(2 * idx(i, j)); };
  auto vedge = [&](int i, int j) { return static_cast<std::int64_t>(2 * idx(i, j) + 1); };
  auto crosses = [&](std::int64_t e) {
    const std::int64_t c = e / 2;
    const int i = static_cast<int>(c % na), j = static_cast<int>(c / na);
    return (e % 2 == 0) ? pos(i, j) != pos(i + 1, j) : pos(i, j) != pos(i, j + 1);
  };

  std::unordered_map<std::int64_t, std::array<std::int64_t, 2>> adj;
  auto link = [&](std::int64_t a, std::int64_t b) {
    for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
      auto it = adj.find(x);
      if (it == adj.end())
        adj.emplace(x, std::array<std::int64_t, 2>{y, -1});
      else
        it->second[1] = y;
    }
  };
  const double da = 2 * std::numbers::pi / na, dt = 2 * std::numbers::pi / nt;
  for (int j = 0; j < nt; ++j)
    for (int i = 0; i < na; ++i) {
      std::array<std::int64_t, 4> e{hedge(i, j), vedge(i + 1, j), hedge(i, j + 1), vedge(i, j)};
      std::vector<std::int64_t> hit;
      for (auto x : e)
        if (crosses(x)) hit.push_back(x);
      if (hit.size() == 2) {
        link(hit[0], hit[1]);
      } else if (hit.size() == 4) {
        const bool centre = field.value(detail::grid_angle(i, na) + da / 2, detail::grid_angle(j, nt) + dt / 2) > 0;
        if (centre == pos(i, j)) {
          link(e[0], e[1]);  // cut off corner (i+1, j)
          link(e[2], e[3]);  // cut off corner (i, j+1)
        } else {
          link(e[0], e[3]);
          link(e[1], e[2]);
        }
      }
    }

  auto crossing = [&](std::int64_t e) {
    const std::int64_t c = e / 2;
    const int i = static_cast<int>(c % na), j = static_cast<int>(c / na);
    double a0 = detail::grid_angle(i, na), t0 = detail::grid_angle(j, nt);
    double a1 = a0, t1 = t0;
    if (e % 2 == 0)
      a1 += da;
    else
      t1 += dt;
    double lo = 0, hi = 1;
    const bool plo = field.value(a0, t0) > 0;
    while ((hi - lo) * std::max(da, dt) > 1e-10) {
      double m = 0.5 * (lo + hi);
      if ((field.value(a0 + m * (a1 - a0), t0 + m * (t1 - t0)) > 0) == plo)
        lo = m;
      else
        hi = m;
    }
    double m = 0.5 * (lo + hi);
    double a = normalize_angle(a0 + m * (a1 - a0)), t = normalize_angle(t0 + m * (t1 - t0));
    JointPoint jp = config_from_slice(g, {l1, a, t}, field.beta()).joint_point();
    return CurvePoint{a, t, jp.l2, jp.l3};
  };

  std::vector<std::int64_t> nodes;
  nodes.reserve(adj.size());
  for (const auto& [k, n] : adj) nodes.push_back(k);
  std::sort(nodes.begin(), nodes.end());
  std::unordered_map<std::int64_t, bool> seen;
  std::vector<std::vector<std::int64_t>> chains;
  for (auto start : nodes) {
    if (seen[start]) continue;
    std::vector<std::int64_t> chain{start};
    seen[start] = true;
    const auto& nb = adj[start];
    std::int64_t prev = start;
    std::int64_t cur = (nb[1] >= 0) ? std::min(nb[0], nb[1]) : nb[0];
    while (cur >= 0 && !seen[cur]) {
      seen[cur] = true;
      chain.push_back(cur);
      const auto& n = adj[cur];
      std::int64_t next = (n[0] == prev) ? n[1] : n[0];
      prev = cur;
      cur = next;
    }
    chains.push_back(std::move(chain));
  }

  std::vector<SingularCurve> curves(chains.size());
  parallel_for(chains.size(), workers, [&](std::size_t k) {
    curves[k].branch_id = static_cast<int>(k);
    curves[k].samples.reserve(chains[k].size());
    for (auto e : chains[k]) curves[k].samples.push_back(crossing(e));
  });
  return curves;
}

/// Bounding box of the curve images padded by 10%, kept inside L2, L3 > 0.
inline Window auto_window(const ManipulatorGeometry& g, const std::vector<SingularCurve>& curves) {
  const double floor = 1e-6 * g.scale();
  Window w{INFINITY, -INFINITY, INFINITY, -INFINITY};
  for (const auto& c : curves)
    for (const auto& p : c.samples) {
      w.l2min = std::min(w.l2min, p.l2);
      w.l2max = std::max(w.l2max, p.l2);
      w.l3min = std::min(w.l3min, p.l3);
      w.l3max = std::max(w.l3max, p.l3);
    }
  if (!std::isfinite(w.l2min)) return {floor, g.scale(), floor, g.scale()};
  const double p2 = 0.1 * (w.l2max - w.l2min), p3 = 0.1 * (w.l3max - w.l3min);
  return {std::max(w.l2min - p2, floor), w.l2max + p2, std::max(w.l3min - p3, floor), w.l3max + p3};
}

namespace detail {

// Curve polylines drawn as 8-connected chains of blocked cells.
inline std::vector<char> rasterize_curves(const RegionGrid& r, const std::vector<SingularCurve>& curves) {
  std::vector<char> blocked(r.counts.size(), 0);
  const double w2 = (r.window.l2max - r.window.l2min) / r.n2, w3 = (r.window.l3max - r.window.l3min) / r.n3;
  auto mark = [&](double u, double v) {
    if (u < 0 || v < 0 || u >= r.n2 || v >= r.n3) return;
    blocked[static_cast<std::size_t>(static_cast<int>(u) + r.n2 * static_cast<int>(v))] = 1;
  };
  for (const auto& c : curves) {
    const std::size_t n = c.samples.size();
    for (std::size_t k = 0; k < n; ++k) {
      const auto& p = c.samples[k];
      const auto& q = c.samples[(k + 1) % n];
      const double u0 = (p.l2 - r.window.l2min) / w2, v0 = (p.l3 - r.window.l3min) / w3;
      const double u1 = (q.l2 - r.window.l2min) / w2, v1 = (q.l3 - r.window.l3min) / w3;
      const double len = std::max(std::abs(u1 - u0), std::abs(v1 - v0));
      if (!std::isfinite(len)) continue;
      const int steps = static_cast<int>(std::ceil(2 * len)) + 1;
      for (int s = 0; s <= steps; ++s) {
        const double f = static_cast<double>(s) / steps;
        mark(u0 + f * (u1 - u0), v0 + f * (v1 - v0));
      }
    }
  }
  return blocked;
}

}  // namespace detail

/// Assembly-mode counts over a window of the slice. Cells crossed by a curve
/// image are -1. The rest is split into faces bounded by the curves; each face
/// is counted at its deepest cell and spot-checked, and recounted cell by cell
/// on any disagreement.
inline RegionGrid region_map(const ManipulatorGeometry& g, double l1, const Window& window, int n2, int n3,
                             const std::vector<SingularCurve>& curves, unsigned workers = 0) {
  if (n2 <= 0 || n3 <= 0) throw Error("region grid resolution must be positive");
  if (!(window.l2max > window.l2min) || !(window.l3max > window.l3min)) throw Error("empty region window");
  if (window.l2min <= 0 || window.l3min <= 0) throw Error("region window must lie in L2, L3 > 0");
  RegionGrid r;
  r.window = window;
  r.n2 = n2;
  r.n3 = n3;
  const std::size_t total = static_cast<std::size_t>(n2) * static_cast<std::size_t>(n3);
  r.counts.assign(total, -1);
  std::vector<char> blocked = detail::rasterize_curves(r, curves);

  // distance (4-steps) to the nearest blocked cell or the border
  std::vector<int> depth(total, -1);
  std::vector<std::size_t> queue;
  queue.reserve(total);
  for (std::size_t k = 0; k < total; ++k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(n2)), j = static_cast<int>(k / static_cast<std::size_t>(n2));
    if (blocked[k]) continue;
    bool edge = i == 0 || j == 0 || i == n2 - 1 || j == n3 - 1;
    if (!edge) {
      edge = blocked[k - 1] || blocked[k + 1] || blocked[k - static_cast<std::size_t>(n2)] || blocked[k + static_cast<std::size_t>(n2)];
    }
    if (edge) {
      depth[k] = 0;
      queue.push_back(k);
    }
  }
  const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
  for (std::size_t h = 0; h < queue.size(); ++h) {
    const std::size_t k = queue[h];
    const int i = static_cast<int>(k % static_cast<std::size_t>(n2)), j = static_cast<int>(k / static_cast<std::size_t>(n2));
    for (int d = 0; d < 4; ++d) {
      const int a = i + di[d], b = j + dj[d];
      if (a < 0 || b < 0 || a >= n2 || b >= n3) continue;
      const std::size_t m = static_cast<std::size_t>(a + n2 * b);
      if (blocked[m] || depth[m] >= 0) continue;
      depth[m] = depth[k] + 1;
      queue.push_back(m);
    }
  }

  std::vector<int> face(total, -1);
  std::vector<std::vector<std::size_t>> faces;
  for (std::size_t s = 0; s < total; ++s) {
    if (blocked[s] || face[s] >= 0) continue;
    const int id = static_cast<int>(faces.size());
    faces.emplace_back();
    auto& cells = faces.back();
    face[s] = id;
    cells.push_back(s);
    for (std::size_t h = 0; h < cells.size(); ++h) {
      const std::size_t k = cells[h];
      const int i = static_cast<int>(k % static_cast<std::size_t>(n2)), j = static_cast<int>(k / static_cast<std::size_t>(n2));
      for (int d = 0; d < 4; ++d) {
        const int a = i + di[d], b = j + dj[d];
        if (a < 0 || b < 0 || a >= n2 || b >= n3) continue;
        const std::size_t m = static_cast<std::size_t>(a + n2 * b);
        if (blocked[m] || face[m] >= 0) continue;
        face[m] = id;
        cells.push_back(m);
      }
    }
    std::sort(cells.begin(), cells.end());
  }

  SliceSolver solver(g, l1);
  auto count_at = [&](std::size_t k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(n2)), j = static_cast<int>(k / static_cast<std::size_t>(n2));
    try {
      return solver.count(r.cell_l2(i), r.cell_l3(j));
    } catch (const DegenerateConfiguration&) {
      return -1;
    }
  };
  std::vector<int> face_count(faces.size(), -1);
  std::vector<char> recount(faces.size(), 0);
  parallel_for(faces.size(), workers, [&](std::size_t f) {
    const auto& cells = faces[f];
    std::size_t best = cells.front();
    int deepest = -1;
    for (auto k : cells)
      if (depth[k] > deepest) deepest = depth[k], best = k;
    const int c = count_at(best);
    face_count[f] = c;
    if (cells.size() >= 16) {
      std::vector<std::size_t> inner;
      for (auto k : cells)
        if (depth[k] >= std::min(deepest, 2)) inner.push_back(k);
      for (std::size_t pick : {inner.size() / 3, 2 * inner.size() / 3})
        if (inner[pick] != best && count_at(inner[pick]) != c) recount[f] = 1;
    }
    if (recount[f]) {
      std::vector<int> own(cells.size());
      for (std::size_t n = 0; n < cells.size(); ++n) own[n] = count_at(cells[n]);
      for (std::size_t n = 0; n < cells.size(); ++n) r.counts[cells[n]] = own[n];
    } else {
      for (auto k : cells) r.counts[k] = c;
    }
  });
  r.faces = static_cast<int>(faces.size());
  r.recounted_faces = static_cast<int>(std::count(recount.begin(), recount.end(), 1));
  return r;
}

inline RegionGrid region_map(const ManipulatorGeometry& g, double l1, const Window& window, int n2, int n3) {
  return region_map(g, l1, window, n2, n3, trace_singular_curves(g, l1));
}

/// 4-connected components of equal count (cells marked -1 excluded).
/// labels[k] is the component of cell k or -1.
struct Components {
  std::vector<int> labels;
  std::vector<int> count_of;  // count carried by each component
  std::vector<int> size_of;
};

inline Components connected_components(const RegionGrid& r) {
  Components c;
  const std::size_t n = r.counts.size();
  c.labels.assign(n, -1);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    if (r.counts[s] < 0 || c.labels[s] >= 0) continue;
    const int id = static_cast<int>(c.count_of.size());
    c.count_of.push_back(r.counts[s]);
    c.size_of.push_back(0);
    stack.push_back(s);
    c.labels[s] = id;
    while (!stack.empty()) {
      std::size_t k = stack.back();
      stack.pop_back();
      ++c.size_of.back();
      const int i = static_cast<int>(k % static_cast<std::size_t>(r.n2)), j = static_cast<int>(k / static_cast<std::size_t>(r.n2));
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const int a = i + di[d], b = j + dj[d];
        if (a < 0 || b < 0 || a >= r.n2 || b >= r.n3) continue;
        const std::size_t m = static_cast<std::size_t>(a + r.n2 * b);
        if (c.labels[m] < 0 && r.counts[m] == r.counts[s]) {
          c.labels[m] = id;
          stack.push_back(m);
        }
      }
    }
  }
  return c;
}

inline RegionSignature region_signature(const RegionGrid& r, int min_cells = 8) {
  Components c = connected_components(r);
  const int floor = std::max(1, min_cells);
  RegionSignature sig;
  for (std::size_t k = 0; k < c.count_of.size(); ++k)
    if (c.count_of[k] > 0 && c.size_of[k] >= floor) ++sig[c.count_of[k]];
  return sig;
}

/// Number of components labelled `inner` that avoid the window border and
/// whose surroundings (looking through curve cells) carry only `outer`.
inline int enclosed_regions(const RegionGrid& r, int inner, int outer, int min_cells = 8) {
  Components c = connected_components(r);
  const int floor = std::max(1, min_cells);
  int found = 0;
  for (std::size_t comp = 0; comp < c.count_of.size(); ++comp) {
    if (c.count_of[comp] != inner || c.size_of[comp] < floor) continue;
    bool ok = true;
    std::vector<char> visited(r.counts.size(), 0);
    std::vector<std::size_t> stack;
    for (std::size_t k = 0; k < r.counts.size(); ++k)
      if (c.labels[k] == static_cast<int>(comp)) stack.push_back(k), visited[k] = 1;
    while (!stack.empty() && ok) {
      std::size_t k = stack.back();
      stack.pop_back();
      const int i = static_cast<int>(k % static_cast<std::size_t>(r.n2)), j = static_cast<int>(k / static_cast<std::size_t>(r.n2));
      if (i == 0 || j == 0 || i == r.n2 - 1 || j == r.n3 - 1) {
        ok = false;
        break;
      }
      const int di[4] = {1, -1, 0, 0}, dj[4] = {0, 0, 1, -1};
      for (int d = 0; d < 4; ++d) {
        const std::size_t m = static_cast<std::size_t>(i + di[d] + r.n2 * (j + dj[d]));
        if (visited[m]) continue;
        visited[m] = 1;
        if (r.counts[m] == -1) {
          stack.push_back(m);
        } else if (c.labels[m] != static_cast<int>(comp)) {
          // small slivers of other counts next to a curve are tolerated
          const int other = c.labels[m];
          if (r.counts[m] != outer && c.size_of[static_cast<std::size_t>(other)] >= floor) ok = false;
        }
      }
    }
    if (ok) ++found;
  }
  return found;
}

namespace detail {

struct SideCheck {
  int checked = 0;
  int violations = 0;
};

// Counts at +-3 region cells along the image normal of sampled curve segments.
// Probes with another piece of curve nearby are skipped.
inline SideCheck check_curve_sides(const ManipulatorGeometry& g, double l1, const RegionGrid& r,
                                   const std::vector<SingularCurve>& curves, const std::vector<CuspPoint>& cusps,
                                   int per_curve = 96) {
  SideCheck out;
  const double h = 3 * std::max((r.window.l2max - r.window.l2min) / r.n2, (r.window.l3max - r.window.l3min) / r.n3);
  struct Mark {
    std::size_t curve;
    double arc;
  };
  std::map<std::pair<long, long>, std::vector<std::pair<std::array<double, 2>, Mark>>> bucket;
  const double cell = 4 * h;
  auto key = [&](double x, double y) { return std::pair<long, long>{static_cast<long>(std::floor(x / cell)), static_cast<long>(std::floor(y / cell))}; };
  std::vector<std::vector<double>> arcs(curves.size());
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& s = curves[c].samples;
    arcs[c].assign(s.size() + 1, 0.0);
    for (std::size_t k = 0; k < s.size(); ++k) {
      const auto& p = s[k];
      const auto& q = s[(k + 1) % s.size()];
      const double len = std::hypot(q.l2 - p.l2, q.l3 - p.l3);
      arcs[c][k + 1] = arcs[c][k] + len;
      const int steps = static_cast<int>(std::ceil(len / h)) + 1;
      for (int t = 0; t < steps; ++t) {
        const double f = static_cast<double>(t) / steps;
        const double x = p.l2 + f * (q.l2 - p.l2), y = p.l3 + f * (q.l3 - p.l3);
        bucket[key(x, y)].push_back({{x, y}, {c, arcs[c][k] + f * len}});
      }
    }
  }
  SliceSolver solver(g, l1);
  for (std::size_t c = 0; c < curves.size(); ++c) {
    const auto& s = curves[c].samples;
    if (s.size() < 4) continue;
    const double total = arcs[c].back();
    const std::size_t stride = std::max<std::size_t>(1, s.size() / static_cast<std::size_t>(per_curve));
    for (std::size_t k = 0; k < s.size(); k += stride) {
      const auto& p = s[k];
      const auto& q = s[(k + 1) % s.size()];
      const double dx = q.l2 - p.l2, dy = q.l3 - p.l3, len = std::hypot(dx, dy);
      if (!(len > 0)) continue;
      const double mx = 0.5 * (p.l2 + q.l2), my = 0.5 * (p.l3 + q.l3), arc = arcs[c][k] + 0.5 * len;
      bool crowded = false;
      const auto [kx, ky] = key(mx, my);
      for (long a = kx - 1; a <= kx + 1 && !crowded; ++a)
        for (long b = ky - 1; b <= ky + 1 && !crowded; ++b) {
          auto it = bucket.find({a, b});
          if (it == bucket.end()) continue;
          for (const auto& [pt, m] : it->second) {
            if (std::hypot(pt[0] - mx, pt[1] - my) >= 4 * h) continue;
            double along = std::abs(m.arc - arc);
            along = std::min(along, total - along);
            if (m.curve != c || along > 1.5 * std::hypot(pt[0] - mx, pt[1] - my) + h) {
              crowded = true;
              break;
            }
          }
        }
      for (const auto& cp : cusps)
        if (std::hypot(cp.l2 - mx, cp.l3 - my) < 4 * h) crowded = true;
      if (crowded) continue;
      const double nx = -dy / len, ny = dx / len;
      const double a2 = mx + h * nx, a3 = my + h * ny, b2 = mx - h * nx, b3 = my - h * ny;
      if (std::min({a2, a3, b2, b3}) <= 0) continue;
      int ca, cb;
      try {
        ca = solver.count(a2, a3);
        cb = solver.count(b2, b3);
      } catch (const DegenerateConfiguration&) {
        continue;
      }
      ++out.checked;
      if (std::abs(ca - cb) != 2) ++out.violations;
    }
  }
  return out;
}

}  // namespace detail

/// Curves, cusps and region map of one slice, with cross-checks.
inline SliceAtlas slice_atlas(const ManipulatorGeometry& g, double l1, const AtlasOptions& opt = {}) {
  SliceAtlas a;
  a.l1 = l1;
  a.curves = trace_singular_curves(g, l1, opt.n_alpha, opt.n_theta, opt.workers);
  CuspOptions co = opt.cusp;
  co.workers = opt.workers;
  CuspReport report = analyze_cusps(g, l1, co);
  a.cusps = report.cusps;
  a.cusp_diagnostics = report.diagnostics;
  a.cusp_count = static_cast<int>(a.cusps.size());
  Window w = opt.window ? *opt.window : auto_window(g, a.curves);
  a.regions = region_map(g, l1, w, opt.n2, opt.n3, a.curves, opt.workers);
  a.signature = region_signature(a.regions, opt.min_region_cells);

  const double step = 2 * std::numbers::pi / std::min(opt.n_alpha, opt.n_theta);
  for (const auto& c : a.cusps) {
    double best = INFINITY;
    for (const auto& curve : a.curves)
      for (const auto& p : curve.samples)
        best = std::min(best, std::hypot(angle_distance(p.alpha, c.alpha), angle_distance(p.theta1, c.theta1)));
    if (best >= 2 * step)
      a.warnings.push_back("cusp at alpha=" + shortest_decimal(c.alpha) + " theta1=" + shortest_decimal(c.theta1) +
                           " is not on a traced curve");
  }
  if (std::any_of(a.regions.counts.begin(), a.regions.counts.end(), [](int v) { return v > 6 || (v > 0 && v % 2); }))
    a.warnings.push_back("region grid holds an odd count or a count above six");
  if (a.regions.recounted_faces > 0)
    a.warnings.push_back(std::to_string(a.regions.recounted_faces) + " region faces had inconsistent counts");
  auto sides = detail::check_curve_sides(g, l1, a.regions, a.curves, a.cusps);
  a.side_checks = sides.checked;
  if (sides.violations > 0)
    a.warnings.push_back(std::to_string(sides.violations) + " of " + std::to_string(sides.checked) +
                         " curve side probes do not differ by two");
  return a;
}

struct SliceSummary {
  double l1 = 0;
  int cusp_count = 0;
  RegionSignature signature;

  friend bool operator==(const SliceSummary& a, const SliceSummary& b) {
    return a.cusp_count == b.cusp_count && a.signature == b.signature;
  }
};

/// Per-slice summaries; slices run in parallel, output in input order.
inline std::vector<SliceSummary> sweep(const ManipulatorGeometry& g, const std::vector<double>& l1_values,
                                       const AtlasOptions& opt = {}) {
  for (double l1 : l1_values) detail::require_positive_l1(l1);
  std::vector<SliceSummary> out(l1_values.size());
  AtlasOptions inner = opt;
  inner.workers = 1;
  parallel_for(l1_values.size(), opt.workers, [&](std::size_t k) {
    SliceAtlas a = slice_atlas(g, l1_values[k], inner);
    out[k] = {l1_values[k], a.cusp_count, a.signature};
  });
  return out;
}

/// l1 samples lo, lo + step, ... up to hi (inclusive within rounding).
inline std::vector<double> sample_range(double lo, double hi, double step) {
  if (!(step > 0)) throw Error("step must be positive");
  if (!(hi >= lo)) throw Error("empty range");
  std::vector<double> out;
  const long n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
  for (long k = 0; k <= n; ++k) out.push_back(lo + static_cast<double>(k) * step);
  return out;
}

/// First index from which every summary equals the last one; nullopt when
/// only the final sample qualifies.
inline std::optional<std::size_t> stable_from(const std::vector<SliceSummary>& s) {
  if (s.empty()) return std::nullopt;
  std::size_t i = s.size() - 1;
  while (i > 0 && s[i - 1] == s.back()) --i;
  if (i == s.size() - 1 && s.size() > 1) return std::nullopt;
  return i;
}

inline std::optional<double> find_stabilization(const ManipulatorGeometry& g, double lo, double hi, double step,
                                                 const AtlasOptions& opt = {}) {
  auto l1s = sample_range(lo, hi, step);
  auto summaries = sweep(g, l1s, opt);
  auto i = stable_from(summaries);
  if (!i) return std::nullopt;
  return l1s[*i];
}

}  // namespace rpr
