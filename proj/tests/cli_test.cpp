// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

// Drives the bea executable end to end.

#include "bea/csv.hpp"
#include "bea/flow_dynamics.hpp"
#include "bea/schedule_file.hpp"
#include "bea/solvers.hpp"

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef BEA_CLI
#error "BEA_CLI must name the bea executable"
#endif

namespace bea {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string output;
};

Result run(const std::string& args) {
  const std::string cmd = std::string(BEA_CLI) + " " + args + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return {-1, ""};
  std::string out;
  char buf[4096];
  while (std::fgets(buf, sizeof buf, pipe)) out += buf;
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / (std::string("bea_cli_") + info->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  // A learned 8-step schedule for the 256-dimensional σ² = 4 model.
  std::string learn(const std::string& out) {
    const auto r = run("learn-schedule --dim 256 --var 4 --target-k 8 --seeds 64 --seed 7 --out " + path(out));
    EXPECT_EQ(r.code, 0) << r.output;
    return path(out) + "/rbe_schedule.sched";
  }

  fs::path dir_;
};

TEST_F(Cli, LearnScheduleWritesKPlusOneKnotsReproducibly) {
  const std::string a = learn("a");
  const std::string b = learn("b");
  const ScheduleFile file = read_schedule_file(a);
  EXPECT_EQ(file.times.size(), 9u);
  EXPECT_EQ(file.target_K, 8);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_TRUE(fs::exists(path("a") + "/resolved_config.json"));
}

TEST_F(Cli, SampleWithLearnedScheduleUsesKEvaluations) {
  const std::string sched = learn("learn");
  const auto r = run("sample --dim 256 --var 4 --solver rbe --schedule-file " + sched + " --n 50 --seed 7 --out " +
                     path("s"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("400 predictor evaluations (8 per sample)"), std::string::npos) << r.output;
}

TEST_F(Cli, SampleWritesRowsAndIsByteIdentical) {
  const std::string sched = learn("learn");
  const std::string args = " --model gaussian --var 4 --solver rbe --schedule-file " + sched + " --n 1000 --seed 7";
  // The schedule was learned in 256 dimensions; sampling in one dimension reuses it as is.
  ASSERT_EQ(run("sample" + args + " --out " + path("x")).code, 0);
  ASSERT_EQ(run("sample" + args + " --out " + path("y")).code, 0);
  const auto table = csv::read_file(path("x") + "/samples.csv");
  EXPECT_EQ(table.rows.size(), 1000u);
  EXPECT_EQ(table.header, (std::vector<std::string>{"x_0"}));
  EXPECT_EQ(slurp(path("x") + "/samples.csv"), slurp(path("y") + "/samples.csv"));
  for (int i = 0; i < 4; ++i) {
    const std::string name = "/trajectory_" + std::to_string(i) + ".csv";
    EXPECT_EQ(slurp(path("x") + name), slurp(path("y") + name));
  }
}

// The logged trajectory of a DRBE run obeys the step law, checked against a fresh correction.
TEST_F(Cli, DrbeTrajectoryObeysStepLaw) {
  const auto r = run("sample --var 4 --solver drbe --r 0.0036 --n 3 --seed 1 --out " + path("d"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto m = GaussianModel::isotropic(1, 4.0);
  const FlowField f(m);
  const auto table = csv::read_file(path("d") + "/trajectory_0.csv");
  ASSERT_GT(table.rows.size(), 2u);
  for (std::size_t k = 0; k + 1 < table.rows.size(); ++k) {
    const auto& row = table.rows[k];
    const double gamma = std::stod(row[2]);
    const double h = std::stod(row[3]);
    const StateVec x = StateVec::Constant(1, std::stod(row[5]));
    const double rho = apply_norm(CorrectionNorm::Rms, correction_term({}, f, gamma, x));
    EXPECT_NEAR(std::stod(row[4]), rho, 1e-12 * std::max(1.0, rho));
    EXPECT_NEAR(h, std::min(1.0 - gamma, std::sqrt(0.0036 / rho)), 1e-12);
  }
  EXPECT_EQ(table.rows.back()[2], "1");
}

TEST_F(Cli, BenchmarkGridRows) {
  const auto r = run("benchmark --dim 256 --var 4 --solvers rbe drbe ddim-uniform-t ancestral --nfe 8 10 12 15 20 "
                     "--n 64 --seed 2 --out " + path("b"));
  ASSERT_EQ(r.code, 0) << r.output;
  const auto table = csv::read_file(path("b") + "/report.csv");
  EXPECT_EQ(table.rows.size(), 20u);
  EXPECT_EQ(table.header.size(), 10u);
  EXPECT_TRUE(fs::exists(path("b") + "/summary.json"));
}

TEST_F(Cli, InspectScheduleEchoesKnotsAndGrid) {
  const std::string sched = learn("learn");
  const auto r = run("inspect-schedule " + sched + " --out " + path("i"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_NE(r.output.find("\n9,0,1\n"), std::string::npos) << r.output;
  const auto grid = csv::read_file(path("i") + "/schedule_grid.csv");
  EXPECT_EQ(grid.header, (std::vector<std::string>{"t", "gamma_rbe", "gamma_linear", "gamma_cosine"}));
  EXPECT_EQ(grid.rows.size(), 101u);
}

TEST_F(Cli, InspectRejectsNonMonotoneFile) {
  const std::string sched = learn("learn");
  ScheduleFile file = read_schedule_file(sched);
  std::swap(file.times[2], file.times[3]);
  std::swap(file.gammas[2], file.gammas[3]);
  std::ofstream(path("bad.sched")) << to_text(file);
  const std::string before = slurp(path("bad.sched"));
  const auto r = run("inspect-schedule " + path("bad.sched") + " --out " + path("i"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("monotonicity violation"), std::string::npos) << r.output;
  EXPECT_EQ(slurp(path("bad.sched")), before);
}

TEST_F(Cli, ConfigFilePrecedence) {
  std::ofstream(path("cfg.json")) << R"({"seed": 3, "n_samples": 5, "model": {"var": 2.0}, "solver": {"kind": "ddim", "K": 4}})";
  const auto r = run("sample --config " + path("cfg.json") + " --n 7 --out " + path("o"));
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(csv::read_file(path("o") + "/samples.csv").rows.size(), 7u);
  const std::string echoed = slurp(path("o") + "/resolved_config.json");
  EXPECT_NE(echoed.find("\"n_samples\": 7"), std::string::npos);
  EXPECT_NE(echoed.find("\"kind\": \"ddim\""), std::string::npos);
  EXPECT_NE(echoed.find("\"seed\": 3"), std::string::npos);
}

TEST_F(Cli, ErrorsExitNonzero) {
  std::ofstream(path("bad.json")) << R"({"seed": 1, "colour": "red"})";
  auto r = run("sample --config " + path("bad.json") + " --out " + path("o"));
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.output.find("unknown config key"), std::string::npos);
  r = run("sample --schedule-file " + path("missing.sched") + " --out " + path("o"));
  EXPECT_NE(r.code, 0);
  r = run("sample --solver drbe --r -1 --out " + path("o"));
  EXPECT_NE(r.code, 0);
  r = run("bogus");
  EXPECT_NE(r.code, 0);
}

}  // namespace
}  // namespace bea
