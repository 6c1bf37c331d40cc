#include <gtest/gtest.h>
#include <unistd.h>

#include <filesystem>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "rpr/cli.hpp"

namespace fs = std::filesystem;
using rpr::Json;

namespace {

const std::string kGeometries = RPR_GEOMETRY_DIR;
const std::string kRef = kGeometries + "/reference.json";

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("rprcusp-cli-" + std::to_string(::getpid()));
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  int run(std::initializer_list<std::string> args) {
    std::vector<std::string> a{"rprcusp"};
    a.insert(a.end(), args);
    std::vector<const char*> argv;
    for (const auto& s : a) argv.push_back(s.c_str());
    err_.str("");
    return rpr::cli::run(static_cast<int>(argv.size()), argv.data(), err_);
  }

  std::string dir(const std::string& name) const { return (root_ / name).string(); }
  static Json load(const std::string& path) { return Json::parse(rpr::read_text(path)); }

  fs::path root_;
  std::ostringstream err_;
};

}  // namespace

TEST_F(Cli, CuspsAtCentralSlice) {
  ASSERT_EQ(run({"cusps", "--geom", kRef, "--l1", "14.98", "--out", dir("c")}), 0) << err_.str();
  Json cusps = load(dir("c") + "/cusps.json");
  ASSERT_EQ(cusps.size(), 6u);
  for (const auto& c : cusps)
    for (const char* key : {"l1", "alpha", "theta1", "l2", "l3", "t", "t1", "residual_singular", "residual_cusp"})
      EXPECT_TRUE(c.contains(key)) << key;
  Json m = load(dir("c") + "/manifest.json");
  EXPECT_EQ(m["geometry"]["sha256"], rpr::cli::sha256_hex(rpr::read_text(kRef)));
  EXPECT_EQ(m["version"], rpr::cli::kVersion);
  EXPECT_EQ(m["parameters"]["l1"], 14.98);
  for (const auto& [name, hash] : m["files"].items())
    EXPECT_EQ(hash, rpr::cli::sha256_hex(rpr::read_text(dir("c") + "/" + name))) << name;
  EXPECT_TRUE(m["files"].contains("cusps.csv"));
}

TEST_F(Cli, RerunIsByteIdentical) {
  for (const char* d : {"a", "b"})
    ASSERT_EQ(run({"atlas", "--geom", kRef, "--l1", "31", "--grid", "128", "--out", dir(d)}), 0) << err_.str();
  for (const char* f : {"atlas.json", "atlas.svg", "curves.csv", "manifest.json"})
    EXPECT_EQ(rpr::read_text(dir("a") + "/" + f), rpr::read_text(dir("b") + "/" + f)) << f;
}

TEST_F(Cli, FormatSelection) {
  ASSERT_EQ(run({"atlas", "--geom", kRef, "--l1", "31", "--grid", "128", "--format", "svg", "--out", dir("s")}), 0);
  EXPECT_TRUE(fs::exists(dir("s") + "/atlas.svg"));
  EXPECT_FALSE(fs::exists(dir("s") + "/atlas.json"));
  EXPECT_TRUE(fs::exists(dir("s") + "/manifest.json"));
  EXPECT_EQ(run({"atlas", "--geom", kRef, "--l1", "31", "--format", "png", "--out", dir("p")}), 2);
}

TEST_F(Cli, SweepFindsEightCuspSlice) {
  ASSERT_EQ(run({"sweep", "--geom", kRef, "--l1-range", "26.5:27.5:0.05", "--grid", "128", "--out", dir("w")}), 0)
      << err_.str();
  Json s = load(dir("w") + "/sweep.json");
  EXPECT_EQ(s.size(), 21u);
  int eights = 0;
  for (const auto& x : s) eights += x["cusp_count"] == 8;
  EXPECT_GE(eights, 1);
  EXPECT_TRUE(fs::exists(dir("w") + "/sweep.csv"));
}

TEST_F(Cli, StabilizeSecondGeometry) {
  ASSERT_EQ(run({"stabilize", "--geom", kGeometries + "/second.json", "--l1-range", "3:8:1", "--grid", "128", "--out", dir("z")}),
            0)
      << err_.str();
  Json s = load(dir("z") + "/stabilize.json");
  ASSERT_TRUE(s["l1_stable"].is_number());
  EXPECT_LE(s["l1_stable"].get<double>(), 5.0);
}

TEST_F(Cli, DirectAndInverseKinematics) {
  ASSERT_EQ(run({"dk", "--geom", kRef, "--l1", "14.98", "--l2", "21.4", "--l3", "19.8", "--out", dir("d")}), 0);
  Json modes = load(dir("d") + "/modes.json");
  ASSERT_EQ(modes.size(), 6u);
  const auto& m = modes[0];
  ASSERT_EQ(run({"ik", "--geom", kRef, "--l1", "14.98", "--alpha", m["alpha"].dump(), "--theta1", m["theta1"].dump(), "--out",
                 dir("i")}),
            0);
  Json ik = load(dir("i") + "/ik.json");
  EXPECT_NEAR(ik["l2"].get<double>(), 21.4, 1e-8);
  EXPECT_NEAR(ik["l3"].get<double>(), 19.8, 1e-8);
  EXPECT_NEAR(ik["theta3"].get<double>(), m["theta3"].get<double>(), 1e-8);
}

TEST_F(Cli, SingularCurves) {
  ASSERT_EQ(run({"singular", "--geom", kRef, "--l1", "0.05", "--out", dir("g")}), 0);
  const std::string csv = rpr::read_text(dir("g") + "/curves.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "branch_id,alpha,theta1,l2,l3");
  EXPECT_EQ(load(dir("g") + "/curves.json")["curves"].size(), 2u);
}

TEST_F(Cli, ValidateAcceptsSampleGeometries) {
  EXPECT_EQ(run({"validate", "--geom", kRef, "--out", dir("v1")}), 0);
  EXPECT_EQ(run({"validate", "--geom", kGeometries + "/second.json", "--out", dir("v2")}), 0);
  Json g = load(dir("v1") + "/geometry.json");
  EXPECT_EQ(g["d3"], 20.84);
}

TEST_F(Cli, InvalidGeometryExitsThree) {
  EXPECT_EQ(run({"validate", "--geom", kGeometries + "/bad.json", "--out", dir("b")}), 3);
  EXPECT_NE(err_.str().find("invalid geometry"), std::string::npos);
  std::ofstream(dir("junk.json")) << "{\"a2x\": 1}";
  EXPECT_EQ(run({"validate", "--geom", dir("junk.json")}), 3);
  std::ofstream(dir("notjson.json")) << "not json";
  EXPECT_EQ(run({"validate", "--geom", dir("notjson.json")}), 3);
}

TEST_F(Cli, BadArgumentsExitTwo) {
  EXPECT_EQ(run({}), 2);
  EXPECT_EQ(run({"cusps", "--geom", kRef}), 2);
  EXPECT_EQ(run({"cusps", "--geom", kRef, "--l1", "-3"}), 2);
  EXPECT_EQ(run({"cusps", "--geom", kRef, "--l1", "abc"}), 2);
  EXPECT_EQ(run({"cusps", "--geom", dir("missing.json"), "--l1", "3"}), 2);
  EXPECT_EQ(run({"sweep", "--geom", kRef, "--l1-range", "5:1:1"}), 2);
  EXPECT_EQ(run({"sweep", "--geom", kRef, "--l1-range", "1:5:0"}), 2);
  EXPECT_EQ(run({"sweep", "--geom", kRef, "--l1-range", "1:5"}), 2);
  EXPECT_EQ(run({"atlas", "--geom", kRef, "--l1", "3", "--window", "0:10:1:10"}), 2);
  EXPECT_EQ(run({"atlas", "--geom", kRef, "--l1", "3", "--grid", "16"}), 2);
  EXPECT_EQ(run({"frobnicate", "--geom", kRef}), 2);
  EXPECT_EQ(run({"cusps", "--geom", kRef, "--l1", "3", "--bogus"}), 2);
  EXPECT_FALSE(err_.str().empty());
}
