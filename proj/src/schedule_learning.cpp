// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/schedule_learning.hpp"

#include "bea/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace bea {

namespace {

void check_config(const ScheduleLearnConfig& cfg) {
  if (cfg.target_K < 1) throw ConfigError("target_K must be >= 1");
  if (cfg.n_seeds < 1) throw ConfigError("n_seeds must be >= 1");
  if (cfg.probe_size < 1) throw ConfigError("probe_size must be >= 1");
  const auto& c = cfg.calibration;
  if (!(c.r_lo > 0.0 && c.r_lo < c.r_hi)) throw ConfigError("calibration needs 0 < r_lo < r_hi");
  if (c.max_bisect_iters < 1) throw ConfigError("max_bisect_iters must be >= 1");
}

std::string format_histogram(const std::map<int, int>& histogram) {
  std::ostringstream out;
  bool first = true;
  for (const auto& [steps, runs] : histogram) {
    out << (first ? "" : ", ") << steps << " steps: " << runs;
    first = false;
  }
  return out.str();
}

}  // namespace

StateVec initial_state(Eigen::Index dim, std::uint64_t seed, std::uint64_t index) {
  auto rng = make_rng(seed, index);
  return standard_normal(dim, rng);
}

std::vector<int> probe_drbe_steps(const FlowField& field, const NoiseSchedule& schedule,
                                  const ScheduleLearnConfig& cfg, double r) {
  DrbeOptions options = cfg.drbe;
  options.threshold_r = r;
  std::vector<int> steps(static_cast<std::size_t>(cfg.probe_size));
  parallel_for(steps.size(), [&](std::size_t i) {
    const StateVec x0 = initial_state(field.dim(), cfg.seed, i);
    steps[i] = static_cast<int>(drbe_sample(field, options, schedule, x0).trajectory.steps());
  });
  return steps;
}

int median_drbe_steps(const FlowField& field, const NoiseSchedule& schedule, const ScheduleLearnConfig& cfg,
                      double r) {
  std::vector<int> steps = probe_drbe_steps(field, schedule, cfg, r);
  auto mid = steps.begin() + static_cast<std::ptrdiff_t>((steps.size() - 1) / 2);
  std::nth_element(steps.begin(), mid, steps.end());
  return *mid;
}

CalibrationResult calibrate_threshold(const FlowField& field, const NoiseSchedule& schedule,
                                      const ScheduleLearnConfig& cfg) {
  check_config(cfg);
  const int target = cfg.target_K;
  const auto& bracket = cfg.calibration;
  const auto steps_at = [&](double r) { return median_drbe_steps(field, schedule, cfg, r); };

  // Step counts fall as r grows. Walk outward from r_init by decades until the target is
  // bracketed: lo gives more steps than the target, hi fewer.
  const double start = std::clamp(cfg.r_init, bracket.r_lo, bracket.r_hi);
  double hit = 0.0;
  double lo = bracket.r_lo;
  double hi = bracket.r_hi;
  int k = steps_at(start);
  const int k_start = k;
  if (k == target) {
    hit = start;
  } else if (k > target) {
    lo = start;
    double r = start;
    while (k > target) {
      if (r >= bracket.r_hi) {
        throw CalibrationError("target K = " + std::to_string(target) + " unreachable: r_hi = " +
                                   std::to_string(bracket.r_hi) + " still gives " + std::to_string(k) + " steps",
                               k, k_start);
      }
      lo = r;
      r = std::min(r * 10.0, bracket.r_hi);
      k = steps_at(r);
    }
    if (k == target) hit = r;
    hi = r;
  } else {
    hi = start;
    double r = start;
    while (k < target) {
      if (r <= bracket.r_lo) {
        throw CalibrationError("target K = " + std::to_string(target) + " unreachable: r_lo = " +
                                   std::to_string(bracket.r_lo) + " still gives only " + std::to_string(k) +
                                   " steps",
                               k_start, k);
      }
      hi = r;
      r = std::max(r / 10.0, bracket.r_lo);
      k = steps_at(r);
    }
    if (k == target) hit = r;
    lo = r;
  }

  for (int iter = 0; iter < bracket.max_bisect_iters && hit == 0.0; ++iter) {
    const double mid = std::sqrt(lo * hi);
    k = steps_at(mid);
    if (k == target) {
      hit = mid;
    } else if (k > target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (hit == 0.0) {
    throw CalibrationError("bisection did not reach target K = " + std::to_string(target) + " within " +
                               std::to_string(bracket.max_bisect_iters) + " iterations",
                           steps_at(hi), steps_at(lo));
  }

  // Locate both ends of the plateau around the hit, within the current bracket.
  constexpr int kEdgeIters = 12;
  double below = lo;  // steps > target (or bracket edge)
  double inside_lo = hit;
  for (int iter = 0; iter < kEdgeIters && below < inside_lo; ++iter) {
    const double mid = std::sqrt(below * inside_lo);
    if (steps_at(mid) == target) {
      inside_lo = mid;
    } else {
      below = mid;
    }
  }
  double above = hi;  // steps < target (or bracket edge)
  double inside_hi = hit;
  for (int iter = 0; iter < kEdgeIters && inside_hi < above; ++iter) {
    const double mid = std::sqrt(inside_hi * above);
    if (steps_at(mid) == target) {
      inside_hi = mid;
    } else {
      above = mid;
    }
  }
  // Within the plateau, take the threshold at which most probe runs have exactly target_K steps.
  constexpr int kPlateauCandidates = 9;
  double best_r = hit;
  long best_count = -1;
  const double log_lo = std::log(inside_lo);
  const double log_hi = std::log(inside_hi);
  for (int c = 0; c < kPlateauCandidates; ++c) {
    const double r = std::exp(log_lo + (log_hi - log_lo) * (c + 0.5) / kPlateauCandidates);
    const auto steps = probe_drbe_steps(field, schedule, cfg, r);
    const long count = std::count(steps.begin(), steps.end(), target);
    if (count > best_count) {
      best_count = count;
      best_r = r;
    }
  }
  if (steps_at(best_r) != target) best_r = hit;
  return {best_r, target};
}

LearnedSchedule learn_rbe_schedule(const FlowField& field, const NoiseSchedule& schedule,
                                   const ScheduleLearnConfig& cfg, double r) {
  if (!(cfg.min_kept_fraction > 0.0 && cfg.min_kept_fraction <= 1.0)) {
    throw ConfigError("min_kept_fraction must lie in (0, 1]");
  }
  check_config(cfg);
  DrbeOptions options = cfg.drbe;
  options.threshold_r = r;

  std::vector<std::vector<double>> runs(static_cast<std::size_t>(cfg.n_seeds));
  parallel_for(runs.size(), [&](std::size_t i) {
    const StateVec x0 = initial_state(field.dim(), cfg.seed, i);
    runs[i] = drbe_sample(field, options, schedule, x0).trajectory.times();
  });

  LearnedSchedule out{InferenceSchedule::uniform_time(schedule, cfg.target_K), r, cfg.target_K, cfg.n_seeds, 0, {}};
  const std::size_t knots = static_cast<std::size_t>(cfg.target_K) + 1;
  std::vector<double> sum(knots, 0.0);
  for (const auto& times : runs) {
    ++out.length_histogram[static_cast<int>(times.size()) - 1];
    if (times.size() != knots) continue;
    ++out.n_kept;
    for (std::size_t k = 0; k < knots; ++k) sum[k] += times[k];
  }
  if (out.n_kept == 0 || out.n_kept < cfg.min_kept_fraction * cfg.n_seeds) {
    throw ScheduleInstabilityError("only " + std::to_string(out.n_kept) + " of " + std::to_string(cfg.n_seeds) +
                                       " DRBE runs took " + std::to_string(cfg.target_K) +
                                       " steps (lengths: " + format_histogram(out.length_histogram) + ")",
                                   out.length_histogram);
  }
  for (double& s : sum) s /= out.n_kept;
  sum.front() = schedule.horizon();
  sum.back() = 0.0;
  out.schedule = InferenceSchedule::from_times(std::move(sum), schedule, ScheduleProvenance::Rbe);
  return out;
}

double monotone_interpolate(const std::vector<double>& xs, const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw DimensionError("monotone_interpolate needs >= 2 matching knots");
  if (x <= xs.front()) return ys.front();
  if (x >= xs.back()) return ys.back();
  const std::size_t k =
      static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;

  const auto secant = [&](std::size_t i) { return (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]); };
  const auto tangent = [&](std::size_t i) {
    if (i == 0) return secant(0);
    if (i == n - 1) return secant(n - 2);
    const double d0 = secant(i - 1);
    const double d1 = secant(i);
    if (d0 * d1 <= 0.0) return 0.0;
    const double h0 = xs[i] - xs[i - 1];
    const double h1 = xs[i + 1] - xs[i];
    const double w0 = 2.0 * h1 + h0;
    const double w1 = h1 + 2.0 * h0;
    return (w0 + w1) / (w0 / d0 + w1 / d1);
  };

  const double h = xs[k + 1] - xs[k];
  const double s = (x - xs[k]) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * ys[k] + (s3 - 2 * s2 + s) * h * tangent(k) + (-2 * s3 + 3 * s2) * ys[k + 1] +
         (s3 - s2) * h * tangent(k + 1);
}

std::vector<ScheduleComparisonRow> compare_schedules(const InferenceSchedule& schedule,
                                                     const NoiseSchedule& noise_schedule, int grid_size) {
  if (grid_size < 2) throw ConfigError("comparison grid needs at least two points");
  const double T = noise_schedule.horizon();
  const int n = noise_schedule.n_discrete();

  NoiseScheduleSpec linear_spec = noise_schedule.spec();
  linear_spec.kind = ScheduleKind::Linear;
  NoiseScheduleSpec cosine_spec = noise_schedule.spec();
  cosine_spec.kind = ScheduleKind::Cosine;
  if (noise_schedule.kind() != ScheduleKind::Linear) linear_spec.linear = {};
  if (noise_schedule.kind() != ScheduleKind::Cosine) cosine_spec.cosine = {};
  linear_spec.n_discrete = n;
  cosine_spec.n_discrete = n;
  const NoiseSchedule linear(linear_spec);
  const NoiseSchedule cosine(cosine_spec);

  // Knot k (0-based) of K steps sits at position T (K - k)/K; store in increasing position order.
  const int K = schedule.steps();
  std::vector<double> positions(static_cast<std::size_t>(K) + 1);
  std::vector<double> values(positions.size());
  for (int k = 0; k <= K; ++k) {
    positions[K - k] = T * (K - k) / K;
    values[K - k] = schedule.gammas()[k];
  }

  std::vector<ScheduleComparisonRow> rows(static_cast<std::size_t>(grid_size));
  for (int i = 0; i < grid_size; ++i) {
    const double t = i == grid_size - 1 ? T : T * i / (grid_size - 1);
    rows[i] = {t, monotone_interpolate(positions, values, t), linear.gamma(t), cosine.gamma(t)};
  }
  return rows;
}

}  // namespace bea
