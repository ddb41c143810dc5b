// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/analytic_models.hpp"
#include "bea/types.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace bea {

/// The diffusion ODE in the γ parameterization, dx/dγ = f(γ, x) = x/(2γ) - ε(γ, x)/(2γ√(1-γ)).
///
/// A FlowField is a cheap handle over an immutable predictor. It counts the predictor calls made
/// through it, so each sampling run works on its own copy.
class FlowField {
 public:
  explicit FlowField(const NoisePredictor& predictor) : predictor_(&predictor) {}

  const NoisePredictor& predictor() const { return *predictor_; }
  Eigen::Index dim() const { return predictor_->dim(); }

  /// f(γ, x) for γ ∈ (0, 1). Counts one function evaluation.
  StateVec operator()(double gamma, const StateVec& x) const;

  /// ε(γ, x) for γ ∈ (0, 1]. Counts one function evaluation.
  StateVec noise(double gamma, const StateVec& x) const;

  /// Analytic ∂f/∂γ and (∂f/∂x)ᵀ v; each counts one derivative evaluation.
  StateVec partial_gamma(double gamma, const StateVec& x) const;
  StateVec jacobian_transpose_apply(double gamma, const StateVec& x, const StateVec& v) const;

  std::uint64_t evaluations() const { return evaluations_; }
  std::uint64_t derivative_evaluations() const { return derivative_evaluations_; }
  void reset_counters() const {
    evaluations_ = 0;
    derivative_evaluations_ = 0;
  }

 private:
  const NoisePredictor* predictor_;
  mutable std::uint64_t evaluations_ = 0;
  mutable std::uint64_t derivative_evaluations_ = 0;
};

enum class CorrectionMethod { Analytic, SymmetricJacobianFD, FullGradientFD };

std::string_view to_string(CorrectionMethod method);
CorrectionMethod correction_method_from_string(std::string_view name);

/// How g(γ, x) = ∂f/∂γ + ½∇‖f‖² is estimated.
///
/// Default finite-difference steps are δγ = max(1e-6, 1e-4 γ), shrunk to half the distance to the
/// nearest end of (0, 1), and δx = 1e-4 (1 + ‖x‖∞). Explicit steps are used as given.
struct CorrectionEstimator {
  CorrectionMethod method = CorrectionMethod::SymmetricJacobianFD;
  std::optional<double> fd_step_gamma;
  std::optional<double> fd_step_x;

  double gamma_step(double gamma) const;
  double x_step(const StateVec& x) const;

  /// Predictor calls per correction, given that f(γ, x) is already known.
  int evaluations_per_call(Eigen::Index dim) const;
  /// Analytic derivative calls per correction.
  int derivative_evaluations_per_call() const;
};

/// Throws ConfigError when the predictor lacks the capability the method relies on.
void check_estimator_supported(const CorrectionEstimator& est, const NoisePredictor& predictor);

/// g(γ, x) = ∂f/∂γ + ½∇ₓ‖f‖².
StateVec correction_term(const CorrectionEstimator& est, const FlowField& field, double gamma, const StateVec& x);

/// Same, reusing an already evaluated f(γ, x).
StateVec correction_term(const CorrectionEstimator& est, const FlowField& field, double gamma, const StateVec& x,
                         const StateVec& flow_at_x);

/// (h²/2) g(γ, x): leading-order gap between the Euler step x + h f(γ, x) and the exact flow at γ + h.
StateVec backward_error_prediction(const FlowField& field, const CorrectionEstimator& est, double gamma,
                                   const StateVec& x, double h);

}  // namespace bea
