// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/inference_schedule.hpp"

#include "bea/types.hpp"

#include <string>

namespace bea {

std::string_view to_string(ScheduleProvenance provenance) {
  switch (provenance) {
    case ScheduleProvenance::UniformTime:
      return "uniform-time";
    case ScheduleProvenance::UniformGamma:
      return "uniform-gamma";
    case ScheduleProvenance::Rbe:
      return "rbe";
    case ScheduleProvenance::Manual:
      return "manual";
  }
  return "unknown";
}

ScheduleProvenance provenance_from_string(std::string_view name) {
  if (name == "uniform-time") return ScheduleProvenance::UniformTime;
  if (name == "uniform-gamma") return ScheduleProvenance::UniformGamma;
  if (name == "rbe") return ScheduleProvenance::Rbe;
  if (name == "manual") return ScheduleProvenance::Manual;
  throw ConfigError("unknown schedule provenance '" + std::string(name) + "'");
}

InferenceSchedule InferenceSchedule::from_times(std::vector<double> times, const NoiseSchedule& schedule,
                                                ScheduleProvenance provenance) {
  if (times.size() < 2) {
    throw ConfigError("inference schedule needs at least two knots");
  }
  if (times.front() != schedule.horizon() || times.back() != 0.0) {
    throw ConfigError("inference schedule anchor violation: must start at T and end at 0");
  }
  for (std::size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] < times[k - 1])) {
      throw ConfigError("inference schedule monotonicity violation at knot " + std::to_string(k + 1));
    }
  }
  InferenceSchedule out;
  out.gammas_.reserve(times.size());
  for (double t : times) out.gammas_.push_back(schedule.gamma(t));
  for (std::size_t k = 1; k < out.gammas_.size(); ++k) {
    if (!(out.gammas_[k] > out.gammas_[k - 1])) {
      throw ConfigError("inference schedule monotonicity violation in gamma at knot " + std::to_string(k + 1));
    }
  }
  out.times_ = std::move(times);
  out.provenance_ = provenance;
  return out;
}

InferenceSchedule InferenceSchedule::uniform_time(const NoiseSchedule& schedule, int steps) {
  if (steps < 1) throw ConfigError("inference schedule needs K >= 1");
  const double T = schedule.horizon();
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) times[k] = T * (steps - k) / steps;
  times.front() = T;
  times.back() = 0.0;
  return from_times(std::move(times), schedule, ScheduleProvenance::UniformTime);
}

InferenceSchedule InferenceSchedule::uniform_gamma(const NoiseSchedule& schedule, int steps) {
  if (steps < 1) throw ConfigError("inference schedule needs K >= 1");
  const double g0 = schedule.gamma_end();
  std::vector<double> times(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) times[k] = schedule.t_inverse(g0 + (1.0 - g0) * k / steps);
  times.front() = schedule.horizon();
  times.back() = 0.0;
  return from_times(std::move(times), schedule, ScheduleProvenance::UniformGamma);
}

}  // namespace bea
