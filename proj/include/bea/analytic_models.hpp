// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/types.hpp"

#include <optional>
#include <random>
#include <vector>

namespace bea {

struct PredictorCapabilities {
  bool has_analytic_flow_derivatives = false;
  bool is_gradient_field = false;
};

/// Noise prediction ε_θ(γ, x).
///
/// Implementations must be deterministic and safe to call concurrently.
/// Models with a closed form may also supply the flow
/// f(γ, x) = x/(2γ) - ε(γ, x)/(2γ√(1-γ)) in a form that avoids the cancellation between the
/// two terms near γ = 0, and, when `has_analytic_flow_derivatives` is set, the partials of f.
class NoisePredictor {
 public:
  virtual ~NoisePredictor() = default;

  virtual Eigen::Index dim() const = 0;
  virtual PredictorCapabilities capabilities() const = 0;
  virtual StateVec predict(double gamma, const StateVec& x) const = 0;

  virtual std::optional<StateVec> closed_form_flow(double /*gamma*/, const StateVec& /*x*/) const {
    return std::nullopt;
  }

  /// ∂f/∂γ at fixed x.
  virtual StateVec flow_partial_gamma(double gamma, const StateVec& x) const;

  /// (∂f/∂x)ᵀ v.
  virtual StateVec flow_jacobian_transpose_apply(double gamma, const StateVec& x, const StateVec& v) const;
};

struct GaussianComponent {
  StateVec mean;
  StateVec var;  // diagonal covariance
};

/// Data distribution N(μ₀, diag(σ₀²)); its forward marginal at level γ is
/// N(√γ μ₀, diag(γσ₀² + 1 - γ)), which gives ε* in closed form.
class GaussianModel final : public NoisePredictor {
 public:
  GaussianModel(StateVec mean, StateVec var);

  /// μ₀ = 0, σ₀² = var in every coordinate.
  static GaussianModel isotropic(Eigen::Index dim, double var);

  Eigen::Index dim() const override { return mean_.size(); }
  PredictorCapabilities capabilities() const override { return {true, true}; }
  StateVec predict(double gamma, const StateVec& x) const override;
  std::optional<StateVec> closed_form_flow(double gamma, const StateVec& x) const override;
  StateVec flow_partial_gamma(double gamma, const StateVec& x) const override;
  StateVec flow_jacobian_transpose_apply(double gamma, const StateVec& x, const StateVec& v) const override;

  /// Transports x_start at γ_start along the flow to γ_end:
  /// x_end = √γ_end μ₀ + √(v(γ_end)/v(γ_start)) (x_start - √γ_start μ₀), v(γ) = γσ₀² + 1 - γ.
  StateVec exact_solution(double gamma_start, const StateVec& x_start, double gamma_end) const;

  StateVec sample_data(std::mt19937_64& rng) const;

  const StateVec& mean() const { return mean_; }
  const StateVec& var() const { return var_; }

 private:
  StateVec marginal_var(double gamma) const;

  StateVec mean_;
  StateVec var_;
};

/// Mixture of diagonal Gaussians. ε* is the posterior-responsibility weighted combination of the
/// per-component predictions, with responsibilities computed by log-sum-exp.
class GmmModel final : public NoisePredictor {
 public:
  GmmModel(std::vector<double> weights, std::vector<GaussianComponent> components);

  /// Two equally weighted unit-variance components at ±offset.
  static GmmModel symmetric_pair(const StateVec& offset, double var = 1.0);

  Eigen::Index dim() const override { return dim_; }
  PredictorCapabilities capabilities() const override { return {false, true}; }
  StateVec predict(double gamma, const StateVec& x) const override;
  std::optional<StateVec> closed_form_flow(double gamma, const StateVec& x) const override;

  StateVec sample_data(std::mt19937_64& rng) const;

  /// Mixture mean and diagonal of the mixture covariance.
  StateVec data_mean() const;
  StateVec data_var() const;

  const std::vector<double>& weights() const { return weights_; }
  const std::vector<GaussianComponent>& components() const { return components_; }

 private:
  std::vector<double> responsibilities(double gamma, const StateVec& x) const;

  std::vector<double> weights_;
  std::vector<GaussianComponent> components_;
  Eigen::Index dim_ = 0;
};

}  // namespace bea
