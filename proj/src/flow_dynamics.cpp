// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/flow_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bea {

StateVec FlowField::operator()(double gamma, const StateVec& x) const {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("flow: gamma must lie in (0, 1)");
  }
  if (x.size() != dim()) {
    throw DimensionError("flow: state dimension does not match predictor");
  }
  ++evaluations_;
  if (auto f = predictor_->closed_form_flow(gamma, x)) {
    return *std::move(f);
  }
  const StateVec eps = predictor_->predict(gamma, x);
  return x / (2.0 * gamma) - eps / (2.0 * gamma * std::sqrt(1.0 - gamma));
}

StateVec FlowField::noise(double gamma, const StateVec& x) const {
  ++evaluations_;
  return predictor_->predict(gamma, x);
}

StateVec FlowField::partial_gamma(double gamma, const StateVec& x) const {
  ++derivative_evaluations_;
  return predictor_->flow_partial_gamma(gamma, x);
}

StateVec FlowField::jacobian_transpose_apply(double gamma, const StateVec& x, const StateVec& v) const {
  ++derivative_evaluations_;
  return predictor_->flow_jacobian_transpose_apply(gamma, x, v);
}

std::string_view to_string(CorrectionMethod method) {
  switch (method) {
    case CorrectionMethod::Analytic:
      return "analytic";
    case CorrectionMethod::SymmetricJacobianFD:
      return "symmetric-jacobian-fd";
    case CorrectionMethod::FullGradientFD:
      return "full-gradient-fd";
  }
  return "unknown";
}

CorrectionMethod correction_method_from_string(std::string_view name) {
  if (name == "analytic") return CorrectionMethod::Analytic;
  if (name == "symmetric-jacobian-fd") return CorrectionMethod::SymmetricJacobianFD;
  if (name == "full-gradient-fd") return CorrectionMethod::FullGradientFD;
  throw ConfigError("unknown correction estimator '" + std::string(name) + "'");
}

double CorrectionEstimator::gamma_step(double gamma) const {
  if (fd_step_gamma) {
    const double d = *fd_step_gamma;
    if (!(d > 0.0) || !(gamma - d > 0.0 && gamma + d < 1.0)) {
      throw DomainError("correction: gamma +/- fd_step_gamma leaves (0, 1)");
    }
    return d;
  }
  return std::min(std::max(1e-6, 1e-4 * gamma), 0.5 * std::min(gamma, 1.0 - gamma));
}

double CorrectionEstimator::x_step(const StateVec& x) const {
  if (fd_step_x) {
    if (!(*fd_step_x > 0.0)) throw ConfigError("fd_step_x must be positive");
    return *fd_step_x;
  }
  return 1e-4 * (1.0 + (x.size() > 0 ? x.cwiseAbs().maxCoeff() : 0.0));
}

// The symmetric-Jacobian count drops to 2 when f(γ, x) == 0, since the directional difference is skipped.
int CorrectionEstimator::evaluations_per_call(Eigen::Index dim) const {
  switch (method) {
    case CorrectionMethod::Analytic:
      return 0;
    case CorrectionMethod::SymmetricJacobianFD:
      return 4;
    case CorrectionMethod::FullGradientFD:
      return 2 + 2 * static_cast<int>(dim);
  }
  return 0;
}

int CorrectionEstimator::derivative_evaluations_per_call() const {
  return method == CorrectionMethod::Analytic ? 2 : 0;
}

void check_estimator_supported(const CorrectionEstimator& est, const NoisePredictor& predictor) {
  const auto caps = predictor.capabilities();
  if (est.method == CorrectionMethod::Analytic && !caps.has_analytic_flow_derivatives) {
    throw ConfigError("analytic correction requires a predictor with analytic flow derivatives");
  }
  if (est.method == CorrectionMethod::SymmetricJacobianFD && !caps.is_gradient_field) {
    throw ConfigError("symmetric-Jacobian correction requires a gradient-field predictor");
  }
}

namespace {

StateVec central_partial_gamma(const CorrectionEstimator& est, const FlowField& field, double gamma,
                               const StateVec& x) {
  const double d = est.gamma_step(gamma);
  return (field(gamma + d, x) - field(gamma - d, x)) / (2.0 * d);
}

}  // namespace

StateVec correction_term(const CorrectionEstimator& est, const FlowField& field, double gamma, const StateVec& x) {
  return correction_term(est, field, gamma, x, field(gamma, x));
}

StateVec correction_term(const CorrectionEstimator& est, const FlowField& field, double gamma, const StateVec& x,
                         const StateVec& flow_at_x) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw DomainError("correction: gamma must lie in (0, 1)");
  }
  check_estimator_supported(est, field.predictor());

  switch (est.method) {
    case CorrectionMethod::Analytic:
      return field.partial_gamma(gamma, x) + field.jacobian_transpose_apply(gamma, x, flow_at_x);

    case CorrectionMethod::SymmetricJacobianFD: {
      StateVec g = central_partial_gamma(est, field, gamma, x);
      const double norm = flow_at_x.norm();
      const double dx = est.x_step(x);
      if (norm > 0.0) {
        // ∇½‖f‖² = Jᵀf = Jf for a symmetric Jacobian: one directional difference along f.
        const StateVec dir = flow_at_x / norm;
        g += norm * (field(gamma, x + dx * dir) - field(gamma, x - dx * dir)) / (2.0 * dx);
      }
      return g;
    }

    case CorrectionMethod::FullGradientFD: {
      StateVec g = central_partial_gamma(est, field, gamma, x);
      const double dx = est.x_step(x);
      StateVec probe = x;
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe[k] = x[k] + dx;
        const double up = field(gamma, probe).squaredNorm();
        probe[k] = x[k] - dx;
        const double down = field(gamma, probe).squaredNorm();
        probe[k] = x[k];
        g[k] += (up - down) / (4.0 * dx);
      }
      return g;
    }
  }
  throw ConfigError("unknown correction method");
}

StateVec backward_error_prediction(const FlowField& field, const CorrectionEstimator& est, double gamma,
                                   const StateVec& x, double h) {
  if (!(gamma + h > 0.0 && gamma + h <= 1.0)) {
    throw DomainError("backward error prediction: gamma + h must lie in (0, 1]");
  }
  if (h == 0.0) return StateVec::Zero(x.size());
  return 0.5 * h * h * correction_term(est, field, gamma, x);
}

}  // namespace bea
