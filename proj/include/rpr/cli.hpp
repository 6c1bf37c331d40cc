#pragma once

#include <openssl/evp.h>

#include <chrono>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rpr/io.hpp"

namespace rpr::cli {

inline constexpr const char* kVersion = "0.1.0";

enum Exit : int { kOk = 0, kFailure = 1, kBadArguments = 2, kInvalidGeometry = 3, kDegenerateSlice = 4 };

struct BadArguments : Error {
  using Error::Error;
};

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) throw Error("sha256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

inline std::vector<double> split_numbers(const std::string& text, std::size_t n, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ':')) {
    try {
      std::size_t used = 0;
      double v = std::stod(part, &used);
      if (used != part.size() || !std::isfinite(v)) throw std::invalid_argument(part);
      out.push_back(v);
    } catch (const std::exception&) {
      throw BadArguments(std::string(what) + ": not a number: '" + part + "'");
    }
  }
  if (out.size() != n) throw BadArguments(std::string(what) + " needs " + std::to_string(n) + " colon-separated numbers");
  return out;
}

struct RunConfig {
  std::string command;
  std::string geometry_path;
  std::optional<double> l1, l2, l3, alpha, theta1;
  std::string l1_range;
  int grid = 512;
  std::string window;
  std::string out;
  std::string format = "csv,json,svg";
  unsigned workers = 0;
};

class Runner {
 public:
  explicit Runner(RunConfig cfg) : cfg_(std::move(cfg)) {}

  int execute() {
    formats_ = parse_formats(cfg_.format);
    if (cfg_.grid < 64) throw BadArguments("--grid must be at least 64");
    const std::string text = read_geometry_text();
    geometry_hash_ = sha256_hex(text);
    try {
      g_ = geometry_from_json(Json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw InvalidGeometry(std::string("geometry file: ") + e.what());
    } catch (const Error& e) {
      throw InvalidGeometry(e.what());
    }
    try {
      validate(g_);
    } catch (const Error& e) {
      throw InvalidGeometry(e.what());
    }
    params_ = Json::object();
    const std::string& c = cfg_.command;
    if (c == "validate") return cmd_validate();
    if (c == "ik") return cmd_ik();
    if (c == "dk") return cmd_dk();
    if (c == "singular") return cmd_singular();
    if (c == "cusps") return cmd_cusps();
    if (c == "atlas") return cmd_atlas();
    if (c == "sweep") return cmd_sweep(false);
    if (c == "stabilize") return cmd_sweep(true);
    throw BadArguments("unknown command " + c);
  }

  const std::filesystem::path& out_dir() const { return dir_; }

  struct InvalidGeometry : Error {
    using Error::Error;
  };

 private:
  static std::set<std::string> parse_formats(const std::string& text) {
    std::set<std::string> out;
    std::stringstream ss(text);
    std::string part;
    while (std::getline(ss, part, ',')) {
      if (part != "csv" && part != "json" && part != "svg") throw BadArguments("unknown format '" + part + "'");
      out.insert(part);
    }
    if (out.empty()) throw BadArguments("--format is empty");
    return out;
  }

  std::string read_geometry_text() const {
    try {
      return read_text(cfg_.geometry_path);
    } catch (const Error& e) {
      throw BadArguments(e.what());
    }
  }

  double need(const std::optional<double>& v, const char* flag) {
    if (!v) throw BadArguments(cfg_.command + " requires " + flag);
    if (!std::isfinite(*v)) throw BadArguments(std::string(flag) + " must be finite");
    params_[flag + 2] = *v;
    return *v;
  }

  double need_length(const std::optional<double>& v, const char* flag) {
    double x = need(v, flag);
    if (!(x > 0)) throw BadArguments(std::string(flag) + " must be positive");
    return x;
  }

  AtlasOptions atlas_options() {
    AtlasOptions o;
    o.n_alpha = o.n_theta = cfg_.grid;
    o.n2 = o.n3 = 2 * cfg_.grid;
    o.workers = cfg_.workers;
    params_["grid"] = cfg_.grid;
    if (!cfg_.window.empty()) {
      auto w = split_numbers(cfg_.window, 4, "--window");
      if (!(w[1] > w[0]) || !(w[3] > w[2]) || w[0] <= 0 || w[2] <= 0)
        throw BadArguments("--window must satisfy 0 < l2min < l2max and 0 < l3min < l3max");
      o.window = Window{w[0], w[1], w[2], w[3]};
      params_["window"] = to_json(*o.window);
    }
    return o;
  }

  std::vector<double> l1_values() {
    if (cfg_.l1_range.empty()) throw BadArguments(cfg_.command + " requires --l1-range");
    auto r = split_numbers(cfg_.l1_range, 3, "--l1-range");
    if (!(r[2] > 0)) throw BadArguments("--l1-range step must be positive");
    if (!(r[1] >= r[0])) throw BadArguments("--l1-range is empty");
    if (!(r[0] > 0)) throw BadArguments("--l1-range must start above zero");
    params_["l1_range"] = {r[0], r[1], r[2]};
    return sample_range(r[0], r[1], r[2]);
  }

  bool wants(const char* f) const { return formats_.count(f) > 0; }

  void prepare_dir() {
    if (!cfg_.out.empty()) {
      dir_ = cfg_.out;
    } else {
      std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
      std::tm tm{};
      gmtime_r(&now, &tm);
      char buf[32];
      std::strftime(buf, sizeof(buf), "%Y%m%d-%H%M%S", &tm);
      dir_ = std::filesystem::path("out") / (cfg_.command + "-" + buf);
    }
    std::filesystem::create_directories(dir_);
  }

  void emit(const std::string& name, const std::string& content) {
    if (dir_.empty()) prepare_dir();
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw Error("cannot write " + (dir_ / name).string());
    f << content;
    files_[name] = sha256_hex(content);
  }

  void emit_json(const std::string& name, const Json& j) { emit(name, j.dump(2) + "\n"); }

  int finish(const std::string& summary) {
    if (dir_.empty()) prepare_dir();
    Json files = Json::object();
    for (const auto& [name, hash] : files_) files[name] = hash;
    Json manifest{{"tool", "rprcusp"},
                  {"version", kVersion},
                  {"command", cfg_.command},
                  {"geometry", {{"path", cfg_.geometry_path}, {"sha256", geometry_hash_}, {"values", to_json(g_)}}},
                  {"parameters", params_},
                  {"formats", std::vector<std::string>(formats_.begin(), formats_.end())},
                  {"files", files}};
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    if (!f) throw Error("cannot write manifest");
    f << manifest.dump(2) << "\n";
    std::cout << summary << "\n" << "output: " << dir_.string() << "\n";
    return kOk;
  }

  int cmd_validate() {
    Json j = to_json(g_);
    j["platform_angle"] = platform_angle(g_);
    j["scale"] = g_.scale();
    if (wants("json")) emit_json("geometry.json", j);
    return finish("geometry is valid");
  }

  int cmd_ik() {
    SlicePose p{need_length(cfg_.l1, "--l1"), need(cfg_.alpha, "--alpha"), need(cfg_.theta1, "--theta1")};
    Configuration c = config_from_slice(g_, p);
    Json j{{"l1", c.l(0)}, {"l2", c.l(1)}, {"l3", c.l(2)}, {"alpha", p.alpha},
           {"theta1", c.theta(0)}, {"theta2", c.theta(1)}, {"theta3", c.theta(2)}, {"degenerate", c.degenerate()}};
    if (!c.degenerate()) {
      j["det_jacobian"] = constraint_jacobian(g_, c).determinant();
      j["singularity"] = singularity_scalar(g_, c);
    }
    if (wants("json")) emit_json("ik.json", j);
    if (wants("csv"))
      emit("ik.csv", "l1,l2,l3\n" + shortest_decimal(c.l(0)) + "," + shortest_decimal(c.l(1)) + "," + shortest_decimal(c.l(2)) + "\n");
    return finish("L = (" + shortest_decimal(c.l(0)) + ", " + shortest_decimal(c.l(1)) + ", " + shortest_decimal(c.l(2)) + ")");
  }

  int cmd_dk() {
    const double l1 = need_length(cfg_.l1, "--l1"), l2 = need_length(cfg_.l2, "--l2"), l3 = need_length(cfg_.l3, "--l3");
    auto modes = assembly_modes(g_, {l1, l2, l3});
    if (wants("json")) emit_json("modes.json", to_json(modes));
    if (wants("csv")) {
      std::string s = "alpha,theta1,theta2,theta3,residual,multiplicity\n";
      for (const auto& m : modes)
        s += shortest_decimal(m.alpha) + "," + shortest_decimal(m.config.theta(0)) + "," + shortest_decimal(m.config.theta(1)) + "," +
             shortest_decimal(m.config.theta(2)) + "," + shortest_decimal(m.residual) + "," + std::to_string(m.multiplicity) + "\n";
      emit("modes.csv", s);
    }
    return finish(std::to_string(modes.size()) + " assembly modes");
  }

  int cmd_singular() {
    const double l1 = need_length(cfg_.l1, "--l1");
    params_["grid"] = cfg_.grid;
    auto curves = trace_singular_curves(g_, l1, cfg_.grid, cfg_.grid, cfg_.workers);
    if (wants("csv")) emit("curves.csv", curves_csv(curves));
    if (wants("json")) emit_json("curves.json", Json{{"l1", l1}, {"curves", curves_json(curves)}});
    return finish(std::to_string(curves.size()) + " singular curve branches");
  }

  int cmd_cusps() {
    const double l1 = need_length(cfg_.l1, "--l1");
    CuspOptions o;
    o.workers = cfg_.workers;
    auto report = analyze_cusps(g_, l1, o);
    if (wants("json")) {
      emit_json("cusps.json", to_json(report.cusps));
      emit_json("diagnostics.json", Json{{"l1", l1}, {"diagnostics", to_json(report.diagnostics)}, {"excluded", to_json(report.excluded)}});
    }
    if (wants("csv")) {
      std::string s = "l1,alpha,theta1,l2,l3,t,t1,residual_singular,residual_cusp\n";
      for (const auto& c : report.cusps)
        s += shortest_decimal(c.l1) + "," + shortest_decimal(c.alpha) + "," + shortest_decimal(c.theta1) + "," + shortest_decimal(c.l2) + "," +
             shortest_decimal(c.l3) + "," + shortest_decimal(c.t) + "," + shortest_decimal(c.t1) + "," +
             shortest_decimal(c.residual_singular) + "," + shortest_decimal(c.residual_cusp) + "\n";
      emit("cusps.csv", s);
    }
    return finish(std::to_string(report.cusps.size()) + " cusp points (relevant degree " +
                  std::to_string(report.diagnostics.relevant_degree) + ")");
  }

  int cmd_atlas() {
    const double l1 = need_length(cfg_.l1, "--l1");
    auto a = slice_atlas(g_, l1, atlas_options());
    if (wants("json")) emit_json("atlas.json", to_json(a));
    if (wants("csv")) emit("curves.csv", curves_csv(a.curves));
    if (wants("svg")) emit("atlas.svg", atlas_svg(a));
    for (const auto& w : a.warnings) std::cerr << "warning: " << w << "\n";
    std::string sig;
    for (const auto& [count, regions] : a.signature) sig += " " + std::to_string(count) + ":" + std::to_string(regions);
    return finish(std::to_string(a.cusp_count) + " cusp points, regions" + sig);
  }

  int cmd_sweep(bool stabilize) {
    auto l1s = l1_values();
    auto opt = atlas_options();
    auto summaries = sweep(g_, l1s, opt);
    std::string text;
    if (stabilize) {
      auto i = stable_from(summaries);
      Json j{{"l1_stable", i ? Json(l1s[*i]) : Json(nullptr)}, {"summaries", to_json(summaries)}};
      if (wants("json")) emit_json("stabilize.json", j);
      text = i ? "pattern stable from l1 = " + shortest_decimal(l1s[*i]) : "pattern never stabilizes in range";
    } else {
      if (wants("json")) emit_json("sweep.json", to_json(summaries));
      int most = 0;
      for (const auto& s : summaries) most = std::max(most, s.cusp_count);
      text = std::to_string(summaries.size()) + " slices, at most " + std::to_string(most) + " cusp points";
    }
    if (wants("csv")) emit(stabilize ? "stabilize.csv" : "sweep.csv", summaries_csv(summaries));
    return finish(text);
  }

  RunConfig cfg_;
  std::set<std::string> formats_;
  ManipulatorGeometry g_;
  std::string geometry_hash_;
  Json params_;
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

/// Entry point shared by the rprcusp executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& err = std::cerr) {
  CLI::App app{"Singularity and cusp analysis of planar 3-RPR manipulators", "rprcusp"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1, 1);
  RunConfig cfg;
  const std::vector<std::pair<const char*, const char*>> commands{
      {"validate", "check a geometry file"},
      {"ik", "leg lengths and angles of a slice pose"},
      {"dk", "assembly modes for given leg lengths"},
      {"singular", "singular curves of a slice"},
      {"cusps", "cusp points of a slice"},
      {"atlas", "curves, cusps and assembly-mode regions of a slice"},
      {"sweep", "slice summaries over an l1 range"},
      {"stabilize", "first l1 after which the slice pattern stays constant"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--geom", cfg.geometry_path, "geometry JSON file")->required();
    sub->add_option("--l1", cfg.l1);
    sub->add_option("--l2", cfg.l2);
    sub->add_option("--l3", cfg.l3);
    sub->add_option("--alpha", cfg.alpha);
    sub->add_option("--theta1", cfg.theta1);
    sub->add_option("--l1-range", cfg.l1_range, "A:B:STEP");
    sub->add_option("--grid", cfg.grid, "angle grid per axis (region grid is twice as fine)");
    sub->add_option("--window", cfg.window, "l2min:l2max:l3min:l3max");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--format", cfg.format, "comma-separated subset of csv,json,svg");
    sub->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
    sub->callback([&cfg, sub] { cfg.command = sub->get_name(); });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return kBadArguments;
  }
  try {
    Runner r(cfg);
    return r.execute();
  } catch (const BadArguments& e) {
    err << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const Runner::InvalidGeometry& e) {
    err << "invalid geometry: " << e.what() << "\n";
    return kInvalidGeometry;
  } catch (const DegenerateSlice& e) {
    err << "degenerate slice: " << e.what() << "\n";
    return kDegenerateSlice;
  } catch (const DegenerateConfiguration& e) {
    err << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

}  // namespace rpr::cli
