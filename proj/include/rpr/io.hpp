#pragma once

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "rpr/atlas.hpp"
#include "rpr/cuspfind.hpp"
#include "rpr/directkin.hpp"
#include "rpr/geometry.hpp"

namespace rpr {

using Json = nlohmann::ordered_json;

inline ManipulatorGeometry geometry_from_json(const Json& j) {
  if (!j.is_object()) throw Error("geometry must be a JSON object");
  auto num = [&](const char* key) {
    if (!j.contains(key)) throw Error(std::string("geometry is missing \"") + key + "\"");
    if (!j.at(key).is_number()) throw Error(std::string("geometry field \"") + key + "\" must be a number");
    return j.at(key).get<double>();
  };
  ManipulatorGeometry g;
  g.a2x = num("a2x");
  g.a3x = num("a3x");
  g.a3y = num("a3y");
  g.d1 = num("d1");
  g.d2 = num("d2");
  g.d3 = num("d3");
  if (j.contains("beta_sign")) {
    if (!j.at("beta_sign").is_number_integer()) throw Error("beta_sign must be 1 or -1");
    g.beta_sign = j.at("beta_sign").get<int>();
  }
  if (j.contains("allow_collinear")) {
    if (!j.at("allow_collinear").is_boolean()) throw Error("allow_collinear must be true or false");
    g.allow_collinear = j.at("allow_collinear").get<bool>();
  }
  return g;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

/// Parses a geometry file; the result is not validated.
inline ManipulatorGeometry load_geometry(const std::string& path) {
  Json j;
  try {
    j = Json::parse(read_text(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(path + ": " + e.what());
  }
  return geometry_from_json(j);
}

inline Json to_json(const ManipulatorGeometry& g) {
  Json j{{"a2x", g.a2x}, {"a3x", g.a3x}, {"a3y", g.a3y}, {"d1", g.d1}, {"d2", g.d2}, {"d3", g.d3}, {"beta_sign", g.beta_sign}};
  if (g.allow_collinear) j["allow_collinear"] = true;
  return j;
}

inline Json to_json(const CuspPoint& c) {
  return Json{{"l1", c.l1},
              {"alpha", c.alpha},
              {"theta1", c.theta1},
              {"l2", c.l2},
              {"l3", c.l3},
              {"t", c.t},
              {"t1", c.t1},
              {"residual_singular", c.residual_singular},
              {"residual_cusp", c.residual_cusp}};
}

inline Json to_json(const std::vector<CuspPoint>& cs) {
  Json a = Json::array();
  for (const auto& c : cs) a.push_back(to_json(c));
  return a;
}

inline Json to_json(const CuspDiagnostics& d) {
  return Json{{"singular_degree", {d.singular_degree_t, d.singular_degree_t1}},
              {"cusp_degree", {d.cusp_degree_t, d.cusp_degree_t1}},
              {"resultant_degree", d.resultant_degree},
              {"square_free_degree", d.square_free_degree},
              {"relevant_degree", d.relevant_degree},
              {"resultant_real_roots", d.resultant_real_roots},
              {"candidates", d.candidates},
              {"rejected_residual", d.rejected_residual},
              {"rejected_spurious", d.rejected_spurious},
              {"degenerate_kernel", d.degenerate_kernel},
              {"excluded_axis", d.excluded_axis},
              {"repeated_roots", d.repeated_roots},
              {"tangency_fallback", d.tangency_fallback}};
}

inline Json to_json(const AssemblyMode& m) {
  return Json{{"alpha", m.alpha},
              {"theta1", m.config.theta(0)},
              {"theta2", m.config.theta(1)},
              {"theta3", m.config.theta(2)},
              {"residual", m.residual},
              {"multiplicity", m.multiplicity}};
}

inline Json to_json(const std::vector<AssemblyMode>& ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

inline Json to_json(const RegionSignature& s) {
  Json a = Json::array();
  for (const auto& [count, regions] : s) a.push_back(Json{{"count", count}, {"regions", regions}});
  return a;
}

inline Json to_json(const SliceSummary& s) {
  return Json{{"l1", s.l1}, {"cusp_count", s.cusp_count}, {"region_signature", to_json(s.signature)}};
}

inline Json to_json(const std::vector<SliceSummary>& ss) {
  Json a = Json::array();
  for (const auto& s : ss) a.push_back(to_json(s));
  return a;
}

inline Json to_json(const Window& w) {
  return Json{{"l2min", w.l2min}, {"l2max", w.l2max}, {"l3min", w.l3min}, {"l3max", w.l3max}};
}

inline Json to_json(const RegionGrid& r) {
  Json rows = Json::array();
  for (int j = 0; j < r.n3; ++j) {
    Json row = Json::array();
    for (int i = 0; i < r.n2; ++i) row.push_back(r.at(i, j));
    rows.push_back(std::move(row));
  }
  return Json{{"window", to_json(r.window)}, {"resolution", {r.n2, r.n3}}, {"faces", r.faces}, {"counts", std::move(rows)}};
}

inline Json curves_json(const std::vector<SingularCurve>& curves) {
  Json a = Json::array();
  for (const auto& c : curves) {
    Json pts = Json::array();
    for (const auto& p : c.samples) pts.push_back({p.alpha, p.theta1, p.l2, p.l3});
    a.push_back(Json{{"branch_id", c.branch_id}, {"samples", std::move(pts)}});
  }
  return a;
}

inline Json to_json(const SliceAtlas& a) {
  return Json{{"l1", a.l1},
              {"cusp_count", a.cusp_count},
              {"region_signature", to_json(a.signature)},
              {"warnings", a.warnings},
              {"cusps", to_json(a.cusps)},
              {"diagnostics", to_json(a.cusp_diagnostics)},
              {"curves", curves_json(a.curves)},
              {"regions", to_json(a.regions)}};
}

inline std::string curves_csv(const std::vector<SingularCurve>& curves) {
  std::string out = "branch_id,alpha,theta1,l2,l3\n";
  for (const auto& c : curves)
    for (const auto& p : c.samples)
      out += std::to_string(c.branch_id) + "," + shortest_decimal(p.alpha) + "," + shortest_decimal(p.theta1) + "," +
             shortest_decimal(p.l2) + "," + shortest_decimal(p.l3) + "\n";
  return out;
}

inline std::string summaries_csv(const std::vector<SliceSummary>& ss) {
  std::string out = "l1,cusp_count,region_signature\n";
  for (const auto& s : ss) {
    std::string sig;
    for (const auto& [count, regions] : s.signature) sig += (sig.empty() ? "" : " ") + std::to_string(count) + ":" + std::to_string(regions);
    out += shortest_decimal(s.l1) + "," + std::to_string(s.cusp_count) + "," + sig + "\n";
  }
  return out;
}

/// Curves as polylines over translucent region fills, cusps circled.
inline std::string atlas_svg(const SliceAtlas& a, int size = 800) {
  const auto& r = a.regions;
  const Window& w = r.window;
  const double sx = size / (w.l2max - w.l2min), sy = size / (w.l3max - w.l3min);
  auto X = [&](double l2) { return (l2 - w.l2min) * sx; };
  auto Y = [&](double l3) { return size - (l3 - w.l3min) * sy; };
  auto fmt = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };
  auto fill = [](int c) -> const char* {
    switch (c) {
      case 2: return "#4a90d9";
      case 4: return "#e8a33d";
      case 6: return "#4caf50";
      default: return nullptr;
    }
  };
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(size) + "\" height=\"" +
                  std::to_string(size) + "\" viewBox=\"0 0 " + std::to_string(size) + " " + std::to_string(size) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n<g fill-opacity=\"0.35\" stroke=\"none\">\n";
  const double cw = (w.l2max - w.l2min) / r.n2 * sx, ch = (w.l3max - w.l3min) / r.n3 * sy;
  for (int j = 0; j < r.n3; ++j) {
    int i = 0;
    while (i < r.n2) {
      const int c = r.at(i, j);
      int k = i;
      while (k < r.n2 && r.at(k, j) == c) ++k;
      if (const char* col = fill(c))
        s += "<rect x=\"" + fmt(i * cw) + "\" y=\"" + fmt(size - (j + 1) * ch) + "\" width=\"" + fmt((k - i) * cw) +
             "\" height=\"" + fmt(ch) + "\" fill=\"" + col + "\"/>\n";
      i = k;
    }
  }
  s += "</g>\n<g fill=\"none\" stroke=\"#b00020\" stroke-width=\"1\">\n";
  for (const auto& c : a.curves) {
    s += "<polygon points=\"";
    for (const auto& p : c.samples) s += fmt(X(p.l2)) + "," + fmt(Y(p.l3)) + " ";
    s += "\"/>\n";
  }
  s += "</g>\n<g fill=\"none\" stroke=\"black\" stroke-width=\"1.5\">\n";
  for (const auto& c : a.cusps) s += "<circle cx=\"" + fmt(X(c.l2)) + "\" cy=\"" + fmt(Y(c.l3)) + "\" r=\"6\"/>\n";
  s += "</g>\n<g font-family=\"sans-serif\" font-size=\"14\">\n";
  s += "<text x=\"8\" y=\"18\">L1 = " + shortest_decimal(a.l1) + ", cusps: " + std::to_string(a.cusp_count) + "</text>\n";
  int y = 36;
  for (int c : {2, 4, 6}) {
    s += "<rect x=\"8\" y=\"" + std::to_string(y - 11) + "\" width=\"12\" height=\"12\" fill=\"" + fill(c) +
         "\" fill-opacity=\"0.35\"/><text x=\"26\" y=\"" + std::to_string(y) + "\">" + std::to_string(c) + " modes</text>\n";
    y += 18;
  }
  s += "</g>\n</svg>\n";
  return s;
}

}  // namespace rpr
