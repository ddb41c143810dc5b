// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/schedule_learning.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

namespace bea {
namespace {

const NoiseSchedule& linear() {
  static const NoiseSchedule s = NoiseSchedule::linear();
  return s;
}

TEST(Calibration, StationaryModelAlwaysTakesOneStep) {
  const auto m = GaussianModel::isotropic(4, 1.0);
  const FlowField f(m);
  ScheduleLearnConfig cfg;
  cfg.target_K = 1;
  const auto res = calibrate_threshold(f, linear(), cfg);
  EXPECT_EQ(res.achieved_K, 1);
  for (double r : {1e-8, 1e-3, 1e4}) EXPECT_EQ(median_drbe_steps(f, linear(), cfg, r), 1);

  cfg.target_K = 8;
  try {
    calibrate_threshold(f, linear(), cfg);
    FAIL() << "expected calibration failure";
  } catch (const CalibrationError& e) {
    EXPECT_EQ(e.min_K(), 1);
    EXPECT_EQ(e.max_K(), 1);
  }
}

TEST(Calibration, LargeThresholdGivesOneStep) {
  const auto m = GaussianModel::isotropic(1, 4.0);
  ScheduleLearnConfig cfg;
  EXPECT_EQ(median_drbe_steps(FlowField(m), linear(), cfg, 1e4), 1);
}

// A log-spaced sweep of r confirms the median step count is non-increasing and crosses 8; the
// calibrated r lands in the crossing.
TEST(Calibration, HitsTargetFoundBySweep) {
  const auto m = GaussianModel::isotropic(1, 4.0);
  const FlowField f(m);
  ScheduleLearnConfig cfg;
  cfg.target_K = 8;
  int prev = 1 << 30;
  bool crossed = false;
  for (int e = -60; e <= 0; ++e) {
    const int k = median_drbe_steps(f, linear(), cfg, std::pow(10.0, e / 10.0));
    EXPECT_LE(k, prev);
    prev = k;
    crossed = crossed || k == 8;
  }
  ASSERT_TRUE(crossed);
  const auto res = calibrate_threshold(f, linear(), cfg);
  EXPECT_EQ(res.achieved_K, 8);
  EXPECT_EQ(median_drbe_steps(f, linear(), cfg, res.r), 8);
}

TEST(Calibration, UnreachableTargetReportsRange) {
  const auto m = GaussianModel::isotropic(1, 4.0);
  ScheduleLearnConfig cfg;
  cfg.target_K = 50;
  cfg.calibration = {1e-3, 1e4, 40};
  try {
    calibrate_threshold(FlowField(m), linear(), cfg);
    FAIL() << "expected calibration failure";
  } catch (const CalibrationError& e) {
    EXPECT_LT(e.max_K(), 50);
    EXPECT_LE(e.min_K(), e.max_K());
  }
}

TEST(Calibration, RejectsBadBracket) {
  const auto m = GaussianModel::isotropic(1, 4.0);
  ScheduleLearnConfig cfg;
  cfg.calibration = {1.0, 0.5, 40};
  EXPECT_THROW(calibrate_threshold(FlowField(m), linear(), cfg), ConfigError);
  cfg = {};
  cfg.target_K = 0;
  EXPECT_THROW(calibrate_threshold(FlowField(m), linear(), cfg), ConfigError);
}

TEST(Learning, SingleSeedReproducesItsRun) {
  const auto m = GaussianModel::isotropic(2, 4.0);
  const FlowField f(m);
  ScheduleLearnConfig cfg;
  cfg.n_seeds = 1;
  cfg.seed = 5;
  DrbeOptions opt;
  opt.threshold_r = 2e-3;
  const auto run = drbe_sample(f, opt, linear(), initial_state(2, 5, 0));
  cfg.target_K = static_cast<int>(run.trajectory.steps());
  const auto learned = learn_rbe_schedule(f, linear(), cfg, 2e-3);
  EXPECT_EQ(learned.schedule.times(), run.trajectory.times());
  EXPECT_EQ(learned.n_kept, 1);
  EXPECT_EQ(learned.schedule.provenance(), ScheduleProvenance::Rbe);
}

TEST(Learning, IdenticalRunsAverageToThemselves) {
  const auto m = GaussianModel::isotropic(3, 1.0);
  ScheduleLearnConfig cfg;
  cfg.target_K = 1;
  cfg.n_seeds = 16;
  const auto learned = learn_rbe_schedule(FlowField(m), linear(), cfg, 1e-3);
  EXPECT_EQ(learned.schedule.times(), (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(learned.discard_fraction(), 0.0);
}

class LearnedHighDim : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    model_ = new GaussianModel(GaussianModel::isotropic(256, 4.0));
    ScheduleLearnConfig cfg;
    cfg.target_K = 10;
    cfg.seed = 3;
    cfg_ = cfg;
    const FlowField f(*model_);
    r_ = calibrate_threshold(f, linear(), cfg).r;
    learned_ = new LearnedSchedule(learn_rbe_schedule(f, linear(), cfg, r_));
  }
  static void TearDownTestSuite() {
    delete learned_;
    delete model_;
  }
  static GaussianModel* model_;
  static LearnedSchedule* learned_;
  static ScheduleLearnConfig cfg_;
  static double r_;
};
GaussianModel* LearnedHighDim::model_ = nullptr;
LearnedSchedule* LearnedHighDim::learned_ = nullptr;
ScheduleLearnConfig LearnedHighDim::cfg_;
double LearnedHighDim::r_ = 0.0;

TEST_F(LearnedHighDim, AnchoredAndStrictlyMonotone) {
  const auto& t = learned_->schedule.times();
  ASSERT_EQ(t.size(), 11u);
  EXPECT_EQ(t.front(), linear().horizon());
  EXPECT_EQ(t.back(), 0.0);
  for (std::size_t k = 0; k + 1 < t.size(); ++k) EXPECT_GT(t[k], t[k + 1]);
  EXPECT_LT(learned_->discard_fraction(), 0.5);
  const int total = std::accumulate(learned_->length_histogram.begin(), learned_->length_histogram.end(), 0,
                                    [](int a, const auto& kv) { return a + kv.second; });
  EXPECT_EQ(total, learned_->n_seeds);
}

TEST_F(LearnedHighDim, RerunIsBitIdentical) {
  const auto again = learn_rbe_schedule(FlowField(*model_), linear(), cfg_, r_);
  EXPECT_EQ(again.schedule.times(), learned_->schedule.times());
  EXPECT_EQ(again.schedule.gammas(), learned_->schedule.gammas());
}

// Euler over the averaged schedule is about as accurate as the DRBE runs it came from.
TEST_F(LearnedHighDim, EndpointErrorComparableToDrbe) {
  const FlowField f(*model_);
  DrbeOptions opt;
  opt.threshold_r = r_;
  const double g0 = linear().gamma_end();
  double drbe_err = 0.0, rbe_err = 0.0;
  const int n = 32;
  for (int i = 0; i < n; ++i) {
    const StateVec x0 = initial_state(256, 1000, static_cast<std::uint64_t>(i));
    const StateVec exact = model_->exact_solution(g0, x0, 1.0);
    drbe_err += (drbe_sample(f, opt, linear(), x0).x - exact).norm() / 16.0;
    rbe_err += (rbe_sample(f, learned_->schedule, x0).x - exact).norm() / 16.0;
  }
  EXPECT_LE(rbe_err, 2.0 * drbe_err);
}

TEST(Learning, SpreadOutLengthsAreRejected) {
  const auto m = GaussianModel::isotropic(1, 4.0);
  const FlowField f(m);
  ScheduleLearnConfig cfg;
  cfg.target_K = 10;
  const double r = calibrate_threshold(f, linear(), cfg).r;
  try {
    learn_rbe_schedule(f, linear(), cfg, r);
    FAIL() << "expected instability";
  } catch (const ScheduleInstabilityError& e) {
    int total = 0;
    for (const auto& [k, c] : e.length_histogram()) total += c;
    EXPECT_EQ(total, cfg.n_seeds);
  }
  cfg.min_kept_fraction = 0.05;
  const auto learned = learn_rbe_schedule(f, linear(), cfg, r);
  EXPECT_EQ(learned.schedule.steps(), 10);
  cfg.min_kept_fraction = 0.0;
  EXPECT_THROW(learn_rbe_schedule(f, linear(), cfg, r), ConfigError);
}

TEST(CompareSchedules, SingleStepSchedule) {
  const auto s = InferenceSchedule::uniform_time(linear(), 1);
  ASSERT_EQ(s.times().size(), 2u);
  const auto rows = compare_schedules(s, linear(), 11);
  ASSERT_EQ(rows.size(), 11u);
  EXPECT_EQ(rows.front().t, 0.0);
  EXPECT_EQ(rows.front().gamma_rbe, 1.0);
  EXPECT_EQ(rows.back().t, 1.0);
  EXPECT_NEAR(rows.back().gamma_rbe, linear().gamma_end(), 1e-15);
}

TEST(CompareSchedules, ColumnsAreMonotone) {
  std::vector<double> times{1.0, 0.6, 0.45, 0.3, 0.12, 0.0};
  const auto s = InferenceSchedule::from_times(times, linear(), ScheduleProvenance::Rbe);
  for (int n : {2, 57, 101}) {
    const auto rows = compare_schedules(s, linear(), n);
    ASSERT_EQ(rows.size(), static_cast<std::size_t>(n));
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      EXPECT_GE(rows[i].gamma_rbe, rows[i + 1].gamma_rbe);
      EXPECT_GT(rows[i].gamma_linear, rows[i + 1].gamma_linear);
      EXPECT_GT(rows[i].gamma_cosine, rows[i + 1].gamma_cosine);
    }
  }
  EXPECT_THROW(compare_schedules(s, linear(), 1), ConfigError);
}

TEST(MonotoneInterpolate, KnotsLinesAndShape) {
  const std::vector<double> xs{0.0, 1.0, 2.0, 4.0};
  const std::vector<double> line{1.0, 3.0, 5.0, 9.0};
  for (double x : {0.0, 0.3, 1.0, 1.7, 3.9, 4.0}) EXPECT_NEAR(monotone_interpolate(xs, line, x), 1.0 + 2.0 * x, 1e-14);
  const std::vector<double> step{0.0, 0.0, 1.0, 1.0};
  double prev = -1.0;
  for (int i = 0; i <= 400; ++i) {
    const double v = monotone_interpolate(xs, step, 4.0 * i / 400);
    EXPECT_GE(v, prev - 1e-15);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    prev = v;
  }
  for (std::size_t k = 0; k < xs.size(); ++k) EXPECT_EQ(monotone_interpolate(xs, step, xs[k]), step[k]);
}

}  // namespace
}  // namespace bea
