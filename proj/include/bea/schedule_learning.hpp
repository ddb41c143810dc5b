// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/flow_dynamics.hpp"
#include "bea/inference_schedule.hpp"
#include "bea/noise_schedule.hpp"
#include "bea/solvers.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

namespace bea {

struct ThresholdBracket {
  double r_lo = 1e-8;
  double r_hi = 1e4;
  int max_bisect_iters = 40;
};

struct ScheduleLearnConfig {
  int target_K = 10;
  int n_seeds = 64;
  int probe_size = 33;  // DRBE runs per calibration probe
  double r_init = 1e-3;  // first probe inside the bracket
  ThresholdBracket calibration;
  DrbeOptions drbe;  // threshold_r is replaced by the calibrated value
  std::uint64_t seed = 0;
  double min_kept_fraction = 0.5;  // fewer conforming runs than this throws ScheduleInstabilityError
};

class CalibrationError : public std::runtime_error {
 public:
  CalibrationError(const std::string& what, int min_K, int max_K)
      : std::runtime_error(what), min_K_(min_K), max_K_(max_K) {}
  /// Known ends of the achievable median step-count range.
  int min_K() const { return min_K_; }
  int max_K() const { return max_K_; }

 private:
  int min_K_;
  int max_K_;
};

class ScheduleInstabilityError : public std::runtime_error {
 public:
  ScheduleInstabilityError(const std::string& what, std::map<int, int> histogram)
      : std::runtime_error(what), histogram_(std::move(histogram)) {}
  const std::map<int, int>& length_histogram() const { return histogram_; }

 private:
  std::map<int, int> histogram_;
};

/// Initial state x ~ N(0, I) of DRBE run `index` under `seed`.
StateVec initial_state(Eigen::Index dim, std::uint64_t seed, std::uint64_t index);

/// DRBE step counts of the probe batch (runs 0..probe_size-1) at threshold r.
std::vector<int> probe_drbe_steps(const FlowField& field, const NoiseSchedule& schedule,
                                  const ScheduleLearnConfig& cfg, double r);

/// Lower median of the DRBE step counts over the probe batch at threshold r.
int median_drbe_steps(const FlowField& field, const NoiseSchedule& schedule, const ScheduleLearnConfig& cfg,
                      double r);

struct CalibrationResult {
  double r = 0.0;
  int achieved_K = 0;
};

/// Finds a threshold whose probe median step count equals target_K: decade steps outward from
/// r_init to bracket the target, then bisection on log r.
/// Once hit, the edges of the plateau of r values with that median are located and the plateau
/// point with the most probe runs at exactly target_K steps is returned.
CalibrationResult calibrate_threshold(const FlowField& field, const NoiseSchedule& schedule,
                                      const ScheduleLearnConfig& cfg);

struct LearnedSchedule {
  InferenceSchedule schedule;
  double threshold_r = 0.0;
  int target_K = 0;
  int n_seeds = 0;
  int n_kept = 0;
  std::map<int, int> length_histogram;  // steps -> runs

  double discard_fraction() const { return n_seeds == 0 ? 0.0 : 1.0 - static_cast<double>(n_kept) / n_seeds; }
};

/// Runs DRBE from n_seeds initial states, keeps the runs with exactly target_K steps and averages
/// their visited times index-wise. The first and last knots are re-anchored to T and 0.
/// Throws ScheduleInstabilityError when fewer than min_kept_fraction of the runs are kept.
LearnedSchedule learn_rbe_schedule(const FlowField& field, const NoiseSchedule& schedule,
                                   const ScheduleLearnConfig& cfg, double r);

struct ScheduleComparisonRow {
  double t = 0.0;
  double gamma_rbe = 0.0;
  double gamma_linear = 0.0;
  double gamma_cosine = 0.0;
};

/// Samples the inference schedule as a noise schedule next to the linear and cosine schedules on a
/// uniform grid of `grid_size` points over [0, T]. Knot k of a K-step schedule sits at
/// T (K - k)/K with value γ_k, and is interpolated with a monotone cubic.
std::vector<ScheduleComparisonRow> compare_schedules(const InferenceSchedule& schedule,
                                                     const NoiseSchedule& noise_schedule, int grid_size = 101);

/// Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes). xs strictly increasing.
double monotone_interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x);

}  // namespace bea
