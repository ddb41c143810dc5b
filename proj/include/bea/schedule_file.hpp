// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/inference_schedule.hpp"
#include "bea/noise_schedule.hpp"
#include "bea/schedule_learning.hpp"

#include <string>
#include <vector>

namespace bea {

/// On-disk form of an inference schedule (format_version 1). JSON text; times and gammas are written
/// with 17 significant digits so they read back bit-exactly.
struct ScheduleFile {
  static constexpr int kFormatVersion = 1;

  NoiseScheduleSpec noise_schedule;
  std::string provenance = "rbe";
  int target_K = 0;
  double threshold_r = 0.0;
  int n_seeds = 0;
  int n_kept = 0;
  std::vector<double> times;
  std::vector<double> gammas;

  static ScheduleFile from_learned(const LearnedSchedule& learned, const NoiseSchedule& noise_schedule);

  /// Rebuilds the inference schedule against the recorded noise schedule.
  InferenceSchedule inference_schedule() const;
};

std::string to_text(const ScheduleFile& file);

/// Rejects unknown format versions, length mismatches, non-monotone knots and gammas that disagree
/// with the recorded noise schedule. Throws ConfigError.
ScheduleFile parse_schedule_file(const std::string& text);

void write_schedule_file(const std::string& path, const ScheduleFile& file);
ScheduleFile read_schedule_file(const std::string& path);

}  // namespace bea
