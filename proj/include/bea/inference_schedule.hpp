// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/noise_schedule.hpp"

#include <string_view>
#include <vector>

namespace bea {

enum class ScheduleProvenance { UniformTime, UniformGamma, Rbe, Manual };

std::string_view to_string(ScheduleProvenance provenance);
ScheduleProvenance provenance_from_string(std::string_view name);

/// K + 1 inference times t_1 = T > t_2 > ... > t_{K+1} = 0 and their γ values, which increase
/// strictly to γ_{K+1} = 1.
class InferenceSchedule {
 public:
  /// Validates anchoring and strict monotonicity; throws ConfigError with "monotonicity violation"
  /// or "anchor" in the message otherwise.
  static InferenceSchedule from_times(std::vector<double> times, const NoiseSchedule& schedule,
                                      ScheduleProvenance provenance = ScheduleProvenance::Manual);

  /// t_k = T (1 - (k-1)/K): uniform re-spacing in time.
  static InferenceSchedule uniform_time(const NoiseSchedule& schedule, int steps);

  /// γ_k = γ(T) + (1 - γ(T)) (k-1)/K.
  static InferenceSchedule uniform_gamma(const NoiseSchedule& schedule, int steps);

  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& gammas() const { return gammas_; }
  int steps() const { return static_cast<int>(times_.size()) - 1; }
  ScheduleProvenance provenance() const { return provenance_; }

 private:
  InferenceSchedule() = default;

  std::vector<double> times_;
  std::vector<double> gammas_;
  ScheduleProvenance provenance_ = ScheduleProvenance::Manual;
};

}  // namespace bea
