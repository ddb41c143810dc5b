// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace bea {

enum class ScheduleKind { Linear, Cosine };

std::string_view to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(std::string_view name);

/// Lower bound on γ. Keeps 1/γ finite at the noisy end of the cosine schedule.
inline constexpr double kGammaFloor = 1e-5;

struct LinearScheduleParams {
  double beta_start = 1e-4;
  double beta_end = 0.02;
};

struct CosineScheduleParams {
  double offset = 0.008;
};

/// Serializable description of a noise schedule.
struct NoiseScheduleSpec {
  ScheduleKind kind = ScheduleKind::Linear;
  double horizon = 1.0;
  int n_discrete = 1000;
  LinearScheduleParams linear;
  CosineScheduleParams cosine;
};

/// Continuous cumulative signal level γ_t on [0, T], with γ_0 = 1 and γ strictly decreasing.
///
/// The linear kind interpolates log γ exactly between the grid points t_i = iT/N, where
/// γ_i = ∏_{j≤i} (1 - β_j) and β is linearly spaced. The cosine kind is
/// γ(t) = γ_floor + (1 - γ_floor) f(t)/f(0) with f(t) = cos²(((t/T + s)/(1 + s)) π/2), so that
/// γ(T) = γ_floor instead of zero.
///
/// Immutable after construction.
class NoiseSchedule {
 public:
  explicit NoiseSchedule(const NoiseScheduleSpec& spec);

  static NoiseSchedule linear(int n_discrete = 1000, double beta_start = 1e-4, double beta_end = 0.02,
                              double horizon = 1.0);
  static NoiseSchedule cosine(int n_discrete = 1000, double offset = 0.008, double horizon = 1.0);

  const NoiseScheduleSpec& spec() const { return spec_; }
  ScheduleKind kind() const { return spec_.kind; }
  double horizon() const { return spec_.horizon; }
  int n_discrete() const { return spec_.n_discrete; }

  /// γ_t for t ∈ [0, T]; throws DomainError outside.
  double gamma(double t) const;

  /// Analytic inverse: the t with gamma(t) == g, for g ∈ [γ(T), 1].
  double t_inverse(double g) const;

  /// α_i = γ(t_i)/γ(t_{i-1}) for i ∈ [1, N].
  double alpha_at(int i) const;

  /// t_i = iT/N, with t_N == T exactly.
  double grid_time(int i) const;

  /// γ(t_i).
  double grid_gamma(int i) const;

  double gamma_end() const { return gamma_end_; }

 private:
  double cosine_deficit(double t) const;  // 1 - f(t)/f(0)

  NoiseScheduleSpec spec_;
  std::vector<double> log_gamma_;  // linear kind: log γ_i for i = 0..N
  double cosine_f0_ = 1.0;
  double gamma_end_ = 0.0;
};

}  // namespace bea
