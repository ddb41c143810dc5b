// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/flow_dynamics.hpp"
#include "bea/inference_schedule.hpp"
#include "bea/noise_schedule.hpp"
#include "bea/types.hpp"

#include <cstdint>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace bea {

/// One knot of a sampling run: the state at (t, γ), the signed γ-step taken from it (0 at the last
/// knot), and ρ(g) when the solver estimated the correction there.
struct TrajectoryRecord {
  double t = 0.0;
  double gamma = 0.0;
  StateVec x;
  double h = 0.0;
  std::optional<double> correction_norm;
};

struct Trajectory {
  std::vector<TrajectoryRecord> records;
  std::uint64_t seed = 0;
  std::uint64_t nfe = 0;               // predictor evaluations
  std::uint64_t derivative_evals = 0;  // analytic derivative evaluations

  std::size_t steps() const { return records.empty() ? 0 : records.size() - 1; }
  /// The visited times (the per-run schedule).
  std::vector<double> times() const;
};

/// CSV with header step,t,gamma,h,correction_norm,x_0..x_{d-1}; absent norms are empty fields.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

struct SampleResult {
  StateVec x;
  Trajectory trajectory;
};

/// The state became non-finite. Carries everything computed up to the failure.
class SolverDivergence : public std::runtime_error {
 public:
  SolverDivergence(const std::string& what, Trajectory partial)
      : std::runtime_error(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

 private:
  Trajectory partial_;
};

enum class CorrectionNorm { Rms, L2, LInf };

std::string_view to_string(CorrectionNorm norm);
CorrectionNorm correction_norm_from_string(std::string_view name);
double apply_norm(CorrectionNorm norm, const StateVec& g);

struct DrbeOptions {
  double threshold_r = 1e-3;
  CorrectionEstimator estimator;
  CorrectionNorm norm = CorrectionNorm::Rms;
  double degenerate_tol = 1e-12;  // ρ(g) at or below this jumps straight to γ = 1
  double h_min = 1e-6;
  double first_step_cap = 1.0;  // first step ≤ cap · (1 - γ_start); 1 disables the cap
};

/// The DRBE step-size rule for a correction of size rho at level gamma.
/// h = min(1 - γ, √(r/ρ)), or 1 - γ when ρ ≤ degenerate_tol, floored at h_min and capped at 1 - γ.
double drbe_step_size(const DrbeOptions& options, double gamma, double rho);

/// Adaptive Euler sampler restricting the backward error: each step from (γ, x) uses the step above
/// with ρ = ρ(g(γ, x)), starting at t = T and stopping when γ reaches 1.
SampleResult drbe_sample(const FlowField& field, const DrbeOptions& options, const NoiseSchedule& schedule,
                         const StateVec& x_init);

/// Euler steps over a fixed inference schedule: x ← x + (γ_{k+1} - γ_k) f(γ_k, x). Uses K evaluations.
SampleResult rbe_sample(const FlowField& field, const InferenceSchedule& schedule, const StateVec& x_init);

/// Deterministic DDIM over the schedule:
/// x ← √(γ'/γ) x + (√(1-γ') - √(γ'/γ)√(1-γ)) ε(γ, x).
SampleResult ddim_sample(const FlowField& field, const InferenceSchedule& schedule, const StateVec& x_init);

enum class AncestralVariance { Small, Large, Zero };

std::string_view to_string(AncestralVariance variance);
AncestralVariance ancestral_variance_from_string(std::string_view name);

/// Ancestral DDPM chain over `n_steps` uniformly re-spaced grid indices N = i_K > ... > i_0 = 0:
/// x ← (x - (1-α)/√(1-γ) ε)/√α + σ z with α = γ_{i_k}/γ_{i_{k-1}}. σ² is (1-γ')/(1-γ)(1-α) for Small,
/// 1-α for Large, 0 for Zero, with γ' the level being stepped to.
SampleResult ancestral_sample(const FlowField& field, const NoiseSchedule& schedule, int n_steps,
                              const StateVec& x_init, std::uint64_t rng_seed,
                              AncestralVariance variance = AncestralVariance::Small);

/// Classical fourth-order Runge-Kutta on a uniform γ grid from gamma_start to gamma_end.
/// Stage abscissae at γ = 1 are moved to 1 - 2⁻⁴⁰, where the generic flow formula is still finite.
StateVec reference_solve(const FlowField& field, double gamma_start, double gamma_end, const StateVec& x_init,
                         int n_fine);

}  // namespace bea
