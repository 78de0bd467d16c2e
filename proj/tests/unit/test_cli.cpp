#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fracporo_cli/cli.hpp"
#include "oracles.hpp"

namespace fracporo {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fracporo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(std::vector<std::string> args) {
    out_.str("");
    err_.str("");
    return cli_main(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(Cli, MissingConfigIsAUsageError) {
  EXPECT_EQ(run({}), kExitConfig);
  EXPECT_NE(err_.str().find("--config"), std::string::npos);
  EXPECT_EQ(run({"--config", "/nonexistent.conf"}), kExitConfig);
  EXPECT_EQ(run({"--config", testing::config_path("zero_data.conf"), "--mode", "R"}), kExitConfig);
}

TEST_F(Cli, HelpExitsCleanly) {
  EXPECT_EQ(run({"--help"}), kExitOk);
  EXPECT_NE(out_.str().find("--check-energy"), std::string::npos);
}

TEST_F(Cli, ZeroDataRunPassesEnergyCheck) {
  EXPECT_EQ(run({"--config", testing::config_path("zero_data.conf"), "--output", dir_.string(),
                 "--steps", "5", "--check-energy"}),
            kExitOk)
      << err_.str();
  EXPECT_NE(out_.str().find("0 violations"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir_ / "timeseries.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "energy.csv"));
}

TEST_F(Cli, ContactRunWritesAllOutputsDeterministically) {
  const std::vector<std::string> args{"--config", testing::config_path("contact.conf"),
                                      "--output", dir_.string(), "--steps", "20",
                                      "--mode", "Q", "--check-energy", "--dump-matrices"};
  ASSERT_EQ(run(args), kExitOk) << err_.str();
  for (const char* f : {"timeseries.csv", "energy.csv", "fields_final.vtk", "fracture_final.vtk",
                        "matrices/W.txt", "matrices/M_upc.txt", "matrices/E1.txt"}) {
    EXPECT_TRUE(fs::exists(dir_ / f)) << f;
  }
  const std::string ts = slurp(dir_ / "timeseries.csv");
  const std::string en = slurp(dir_ / "energy.csv");
  EXPECT_EQ(std::count(ts.begin(), ts.end(), '\n'), 22);  // header, initial state, 20 steps
  ASSERT_EQ(run(args), kExitOk);
  EXPECT_EQ(slurp(dir_ / "timeseries.csv"), ts);
  EXPECT_EQ(slurp(dir_ / "energy.csv"), en);
}

TEST_F(Cli, FieldSnapshotsFollowTheInterval) {
  std::ofstream(dir_.string() + ".conf")
      << slurp(testing::config_path("zero_data.conf")) << "fields_every = 2\n";
  ASSERT_EQ(run({"--config", dir_.string() + ".conf", "--output", dir_.string(), "--steps", "4"}),
            kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "fields_000000.vtk"));
  EXPECT_TRUE(fs::exists(dir_ / "fracture_000004.vtk"));
  EXPECT_FALSE(fs::exists(dir_ / "fields_000001.vtk"));
  fs::remove(dir_.string() + ".conf");
}

TEST_F(Cli, NonConvergenceExitCode) {
  std::string text = slurp(testing::config_path("contact.conf"));
  text.replace(text.find("[time]"), 6, "[time]\nmax_fixed_point_iters = 1");
  std::ofstream(dir_.string() + ".conf") << text;
  EXPECT_EQ(run({"--config", dir_.string() + ".conf", "--output", dir_.string(), "--steps", "50"}),
            kExitNonConvergence);
  fs::remove(dir_.string() + ".conf");
}

TEST_F(Cli, ConvergenceMode) {
  ASSERT_EQ(run({"--config", testing::config_path("manufactured.conf"), "--output", dir_.string(),
                 "--convergence", "2"}),
            kExitOk)
      << err_.str();
  EXPECT_TRUE(fs::exists(dir_ / "convergence.csv"));
  EXPECT_NE(out_.str().find("observed orders"), std::string::npos);
  EXPECT_EQ(run({"--config", testing::config_path("contact.conf"), "--output", dir_.string(),
                 "--convergence", "2"}),
            kExitConfig);
}

}  // namespace
}  // namespace fracporo
