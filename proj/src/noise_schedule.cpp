// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/noise_schedule.hpp"

#include "bea/types.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bea {

std::string_view to_string(ScheduleKind kind) {
  switch (kind) {
    case ScheduleKind::Linear:
      return "linear";
    case ScheduleKind::Cosine:
      return "cosine";
  }
  return "unknown";
}

ScheduleKind schedule_kind_from_string(std::string_view name) {
  if (name == "linear") return ScheduleKind::Linear;
  if (name == "cosine") return ScheduleKind::Cosine;
  throw ConfigError("unknown noise schedule kind '" + std::string(name) + "'");
}

NoiseSchedule::NoiseSchedule(const NoiseScheduleSpec& spec) : spec_(spec) {
  if (!(spec_.horizon > 0.0) || !std::isfinite(spec_.horizon)) {
    throw ConfigError("noise schedule horizon T must be positive");
  }
  if (spec_.n_discrete < 1) {
    throw ConfigError("noise schedule needs at least one discrete step");
  }
  const int n = spec_.n_discrete;
  if (spec_.kind == ScheduleKind::Linear) {
    const auto& p = spec_.linear;
    if (!(p.beta_start > 0.0 && p.beta_start < 1.0 && p.beta_end > 0.0 && p.beta_end < 1.0)) {
      throw ConfigError("linear schedule betas must lie in (0, 1)");
    }
    log_gamma_.resize(static_cast<std::size_t>(n) + 1);
    log_gamma_[0] = 0.0;
    for (int i = 1; i <= n; ++i) {
      const double beta =
          n == 1 ? p.beta_start : p.beta_start + (p.beta_end - p.beta_start) * (i - 1) / (n - 1);
      log_gamma_[i] = log_gamma_[i - 1] + std::log1p(-beta);
    }
    gamma_end_ = std::exp(log_gamma_[n]);
    if (gamma_end_ < kGammaFloor) {
      throw ConfigError("linear schedule reaches gamma below the floor 1e-5; reduce N or beta_end");
    }
  } else {
    if (!(spec_.cosine.offset >= 0.0)) {
      throw ConfigError("cosine schedule offset must be nonnegative");
    }
    const double theta0 = spec_.cosine.offset / (1.0 + spec_.cosine.offset) * std::numbers::pi / 2.0;
    cosine_f0_ = std::cos(theta0) * std::cos(theta0);
    gamma_end_ = gamma(spec_.horizon);
  }
}

NoiseSchedule NoiseSchedule::linear(int n_discrete, double beta_start, double beta_end, double horizon) {
  NoiseScheduleSpec spec;
  spec.kind = ScheduleKind::Linear;
  spec.horizon = horizon;
  spec.n_discrete = n_discrete;
  spec.linear = {beta_start, beta_end};
  return NoiseSchedule(spec);
}

NoiseSchedule NoiseSchedule::cosine(int n_discrete, double offset, double horizon) {
  NoiseScheduleSpec spec;
  spec.kind = ScheduleKind::Cosine;
  spec.horizon = horizon;
  spec.n_discrete = n_discrete;
  spec.cosine.offset = offset;
  return NoiseSchedule(spec);
}

// Computed as sin(θ+θ0) sin(θ-θ0) / cos²θ0 to keep precision near t = 0.
double NoiseSchedule::cosine_deficit(double t) const {
  const double s = spec_.cosine.offset;
  const double theta = (t / spec_.horizon + s) / (1.0 + s) * std::numbers::pi / 2.0;
  const double theta0 = s / (1.0 + s) * std::numbers::pi / 2.0;
  return std::sin(theta + theta0) * std::sin(theta - theta0) / cosine_f0_;
}

double NoiseSchedule::gamma(double t) const {
  const double T = spec_.horizon;
  if (!(t >= 0.0 && t <= T)) {
    throw DomainError("gamma: t must lie in [0, T]");
  }
  if (t == 0.0) return 1.0;
  if (spec_.kind == ScheduleKind::Linear) {
    const int n = spec_.n_discrete;
    const double u = t == T ? n : t * n / T;
    const int i = std::min(static_cast<int>(u), n - 1);
    const double frac = u - i;
    const double lg = log_gamma_[i] + frac * (log_gamma_[i + 1] - log_gamma_[i]);
    return std::max(std::exp(lg), kGammaFloor);
  }
  return 1.0 - (1.0 - kGammaFloor) * cosine_deficit(t);
}

double NoiseSchedule::t_inverse(double g) const {
  const double tol = 1e-12;
  if (!(g <= 1.0 + tol && g >= gamma_end_ * (1.0 - tol))) {
    throw DomainError("t_inverse: gamma must lie in [gamma(T), 1]");
  }
  const double T = spec_.horizon;
  if (g >= 1.0) return 0.0;
  if (g <= gamma_end_) return T;
  if (spec_.kind == ScheduleKind::Linear) {
    const int n = spec_.n_discrete;
    const double lg = std::log(g);
    // log γ_i is strictly decreasing; find i with log γ_i >= lg > log γ_{i+1}.
    auto it = std::lower_bound(log_gamma_.begin(), log_gamma_.end(), lg, std::greater<>());
    int i = static_cast<int>(it - log_gamma_.begin()) - 1;
    i = std::clamp(i, 0, n - 1);
    const double frac = (lg - log_gamma_[i]) / (log_gamma_[i + 1] - log_gamma_[i]);
    return std::clamp((i + frac) * T / n, 0.0, T);
  }
  const double s = spec_.cosine.offset;
  const double one_minus_ratio = (1.0 - g) / (1.0 - kGammaFloor);
  const double c = cosine_f0_ * (1.0 - one_minus_ratio);
  const double theta = std::acos(std::sqrt(std::max(c, 0.0)));
  const double t = T * (theta * 2.0 / std::numbers::pi * (1.0 + s) - s);
  return std::clamp(t, 0.0, T);
}

double NoiseSchedule::grid_time(int i) const {
  if (i < 0 || i > spec_.n_discrete) {
    throw DomainError("grid index out of range");
  }
  if (i == spec_.n_discrete) return spec_.horizon;
  return i * spec_.horizon / spec_.n_discrete;
}

double NoiseSchedule::grid_gamma(int i) const {
  if (i < 0 || i > spec_.n_discrete) {
    throw DomainError("grid index out of range");
  }
  if (spec_.kind == ScheduleKind::Linear) {
    return std::exp(log_gamma_[i]);
  }
  return gamma(grid_time(i));
}

double NoiseSchedule::alpha_at(int i) const {
  if (i < 1 || i > spec_.n_discrete) {
    throw DomainError("alpha_at: index must lie in [1, N]");
  }
  return grid_gamma(i) / grid_gamma(i - 1);
}

}  // namespace bea
