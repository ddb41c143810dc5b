// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/solvers.hpp"

#include "bea/csv.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bea {

std::vector<double> Trajectory::times() const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.t);
  return out;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory) {
  std::vector<std::string> fields{"step", "t", "gamma", "h", "correction_norm"};
  const Eigen::Index dim = trajectory.records.empty() ? 0 : trajectory.records.front().x.size();
  for (Eigen::Index k = 0; k < dim; ++k) fields.push_back("x_" + std::to_string(k));
  csv::write_row(out, fields);
  for (std::size_t i = 0; i < trajectory.records.size(); ++i) {
    const auto& r = trajectory.records[i];
    fields.clear();
    fields.push_back(std::to_string(i));
    fields.push_back(csv::format_double(r.t));
    fields.push_back(csv::format_double(r.gamma));
    fields.push_back(csv::format_double(r.h));
    fields.push_back(r.correction_norm ? csv::format_double(*r.correction_norm) : std::string());
    for (Eigen::Index k = 0; k < r.x.size(); ++k) fields.push_back(csv::format_double(r.x[k]));
    csv::write_row(out, fields);
  }
}

std::string_view to_string(CorrectionNorm norm) {
  switch (norm) {
    case CorrectionNorm::Rms:
      return "rms";
    case CorrectionNorm::L2:
      return "l2";
    case CorrectionNorm::LInf:
      return "linf";
  }
  return "unknown";
}

CorrectionNorm correction_norm_from_string(std::string_view name) {
  if (name == "rms") return CorrectionNorm::Rms;
  if (name == "l2") return CorrectionNorm::L2;
  if (name == "linf") return CorrectionNorm::LInf;
  throw ConfigError("unknown correction norm '" + std::string(name) + "'");
}

double apply_norm(CorrectionNorm norm, const StateVec& g) {
  if (g.size() == 0) return 0.0;
  switch (norm) {
    case CorrectionNorm::Rms:
      return g.norm() / std::sqrt(static_cast<double>(g.size()));
    case CorrectionNorm::L2:
      return g.norm();
    case CorrectionNorm::LInf:
      return g.cwiseAbs().maxCoeff();
  }
  return g.norm();
}

std::string_view to_string(AncestralVariance variance) {
  switch (variance) {
    case AncestralVariance::Small:
      return "small";
    case AncestralVariance::Large:
      return "large";
    case AncestralVariance::Zero:
      return "zero";
  }
  return "unknown";
}

AncestralVariance ancestral_variance_from_string(std::string_view name) {
  if (name == "small") return AncestralVariance::Small;
  if (name == "large") return AncestralVariance::Large;
  if (name == "zero") return AncestralVariance::Zero;
  throw ConfigError("unknown ancestral variance '" + std::string(name) + "'");
}

namespace {

void check_initial_state(const FlowField& field, const StateVec& x_init) {
  if (x_init.size() != field.dim()) {
    throw DimensionError("initial state dimension does not match the model");
  }
  if (!all_finite(x_init)) {
    throw ConfigError("initial state must be finite");
  }
}

void finish(Trajectory& trajectory, const FlowField& local) {
  trajectory.nfe = local.evaluations();
  trajectory.derivative_evals = local.derivative_evaluations();
}

[[noreturn]] void diverged(Trajectory trajectory, const FlowField& local, const char* solver) {
  finish(trajectory, local);
  const std::string what =
      std::string(solver) + ": state became non-finite after " + std::to_string(trajectory.records.size()) + " steps";
  throw SolverDivergence(what, std::move(trajectory));
}

void check_options(const DrbeOptions& options) {
  if (!(options.threshold_r > 0.0) || std::isnan(options.threshold_r)) {
    throw ConfigError("DRBE threshold r must be positive");
  }
  if (!(options.h_min > 0.0 && options.h_min < 1.0)) {
    throw ConfigError("DRBE h_min must lie in (0, 1)");
  }
  if (!(options.first_step_cap > 0.0 && options.first_step_cap <= 1.0)) {
    throw ConfigError("DRBE first_step_cap must lie in (0, 1]");
  }
  if (!(options.degenerate_tol >= 0.0)) {
    throw ConfigError("DRBE degenerate_tol must be nonnegative");
  }
}

}  // namespace

double drbe_step_size(const DrbeOptions& options, double gamma, double rho) {
  const double remaining = 1.0 - gamma;
  double h = rho <= options.degenerate_tol ? remaining : std::min(remaining, std::sqrt(options.threshold_r / rho));
  h = std::max(h, options.h_min);
  return std::min(h, remaining);
}

SampleResult drbe_sample(const FlowField& field, const DrbeOptions& options, const NoiseSchedule& schedule,
                         const StateVec& x_init) {
  check_options(options);
  check_estimator_supported(options.estimator, field.predictor());
  check_initial_state(field, x_init);

  FlowField local = field;
  local.reset_counters();
  Trajectory trajectory;

  double t = schedule.horizon();
  double gamma = schedule.gamma_end();
  const double first_cap = options.first_step_cap * (1.0 - gamma);
  StateVec x = x_init;
  bool first = true;

  while (gamma < 1.0) {
    const StateVec f = local(gamma, x);
    const StateVec g = correction_term(options.estimator, local, gamma, x, f);
    const double rho = apply_norm(options.norm, g);
    double h = drbe_step_size(options, gamma, rho);
    if (first && options.first_step_cap < 1.0) h = std::min(h, first_cap);
    first = false;

    trajectory.records.push_back({t, gamma, x, h, rho});
    if (!std::isfinite(rho)) diverged(std::move(trajectory), local, "drbe");
    x += h * f;
    if (!all_finite(x)) diverged(std::move(trajectory), local, "drbe");

    const bool last = h >= 1.0 - gamma || gamma + h >= 1.0;
    gamma = last ? 1.0 : gamma + h;
    t = last ? 0.0 : schedule.t_inverse(gamma);
  }
  trajectory.records.push_back({0.0, 1.0, x, 0.0, std::nullopt});
  finish(trajectory, local);
  return {std::move(x), std::move(trajectory)};
}

SampleResult rbe_sample(const FlowField& field, const InferenceSchedule& schedule, const StateVec& x_init) {
  check_initial_state(field, x_init);
  FlowField local = field;
  local.reset_counters();
  Trajectory trajectory;

  const auto& times = schedule.times();
  const auto& gammas = schedule.gammas();
  StateVec x = x_init;
  for (int k = 0; k < schedule.steps(); ++k) {
    const double h = gammas[k + 1] - gammas[k];
    trajectory.records.push_back({times[k], gammas[k], x, h, std::nullopt});
    x += h * local(gammas[k], x);
    if (!all_finite(x)) diverged(std::move(trajectory), local, "rbe");
  }
  trajectory.records.push_back({times.back(), gammas.back(), x, 0.0, std::nullopt});
  finish(trajectory, local);
  return {std::move(x), std::move(trajectory)};
}

SampleResult ddim_sample(const FlowField& field, const InferenceSchedule& schedule, const StateVec& x_init) {
  check_initial_state(field, x_init);
  FlowField local = field;
  local.reset_counters();
  Trajectory trajectory;

  const auto& times = schedule.times();
  const auto& gammas = schedule.gammas();
  StateVec x = x_init;
  for (int k = 0; k < schedule.steps(); ++k) {
    const double cur = gammas[k];
    const double next = gammas[k + 1];
    trajectory.records.push_back({times[k], cur, x, next - cur, std::nullopt});
    const double keep = std::sqrt(next / cur);
    const double noise_coeff = std::sqrt(1.0 - next) - keep * std::sqrt(1.0 - cur);
    x = keep * x + noise_coeff * local.noise(cur, x);
    if (!all_finite(x)) diverged(std::move(trajectory), local, "ddim");
  }
  trajectory.records.push_back({times.back(), gammas.back(), x, 0.0, std::nullopt});
  finish(trajectory, local);
  return {std::move(x), std::move(trajectory)};
}

SampleResult ancestral_sample(const FlowField& field, const NoiseSchedule& schedule, int n_steps,
                              const StateVec& x_init, std::uint64_t rng_seed, AncestralVariance variance) {
  check_initial_state(field, x_init);
  const int n = schedule.n_discrete();
  if (n_steps < 1 || n_steps > n) {
    throw ConfigError("ancestral sampling needs 1 <= n_steps <= N");
  }
  FlowField local = field;
  local.reset_counters();
  Trajectory trajectory;
  trajectory.seed = rng_seed;
  auto rng = make_rng(rng_seed);

  std::vector<int> index(static_cast<std::size_t>(n_steps) + 1);
  for (int k = 0; k <= n_steps; ++k) {
    index[k] = static_cast<int>(std::llround(static_cast<double>(k) * n / n_steps));
  }

  StateVec x = x_init;
  for (int k = n_steps; k >= 1; --k) {
    const int i = index[k];
    const int j = index[k - 1];
    const double gamma = schedule.grid_gamma(i);
    const double gamma_prev = schedule.grid_gamma(j);
    const double alpha = gamma / gamma_prev;
    trajectory.records.push_back({schedule.grid_time(i), gamma, x, gamma_prev - gamma, std::nullopt});

    const StateVec eps = local.noise(gamma, x);
    const StateVec mean = (x - (1.0 - alpha) / std::sqrt(1.0 - gamma) * eps) / std::sqrt(alpha);
    double sigma2 = 0.0;
    switch (variance) {
      case AncestralVariance::Small:
        sigma2 = (1.0 - gamma_prev) / (1.0 - gamma) * (1.0 - alpha);
        break;
      case AncestralVariance::Large:
        sigma2 = 1.0 - alpha;
        break;
      case AncestralVariance::Zero:
        break;
    }
    const StateVec z = standard_normal(x.size(), rng);
    x = mean + std::sqrt(sigma2) * z;
    if (!all_finite(x)) diverged(std::move(trajectory), local, "ancestral");
  }
  trajectory.records.push_back({0.0, schedule.grid_gamma(0), x, 0.0, std::nullopt});
  finish(trajectory, local);
  return {std::move(x), std::move(trajectory)};
}

StateVec reference_solve(const FlowField& field, double gamma_start, double gamma_end, const StateVec& x_init,
                         int n_fine) {
  check_initial_state(field, x_init);
  if (n_fine < 1) throw ConfigError("reference_solve needs n_fine >= 1");
  if (!(gamma_start > 0.0 && gamma_start <= 1.0 && gamma_end > 0.0 && gamma_end <= 1.0)) {
    throw DomainError("reference_solve: gamma endpoints must lie in (0, 1]");
  }
  if (gamma_start == gamma_end) return x_init;

  constexpr double kTop = 1.0 - 0x1p-40;
  const auto stage = [&](double gamma, const StateVec& x) { return field(std::min(gamma, kTop), x); };

  const double h = (gamma_end - gamma_start) / n_fine;
  StateVec x = x_init;
  for (int k = 0; k < n_fine; ++k) {
    const double g0 = gamma_start + k * h;
    const double g1 = k + 1 == n_fine ? gamma_end : gamma_start + (k + 1) * h;
    const double step = g1 - g0;
    const double mid = g0 + 0.5 * step;
    const StateVec k1 = stage(g0, x);
    const StateVec k2 = stage(mid, x + 0.5 * step * k1);
    const StateVec k3 = stage(mid, x + 0.5 * step * k2);
    const StateVec k4 = stage(g1, x + step * k3);
    x += step / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!all_finite(x)) {
      throw SolverDivergence("reference_solve: state became non-finite", Trajectory{});
    }
  }
  return x;
}

}  // namespace bea
