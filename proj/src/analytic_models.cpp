// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/analytic_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

namespace bea {

namespace {

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw DomainError("gamma must lie in (0, 1]");
  }
}

void check_dim(const StateVec& x, Eigen::Index dim) {
  if (x.size() != dim) {
    throw DimensionError("state dimension " + std::to_string(x.size()) + " does not match model dimension " +
                         std::to_string(dim));
  }
}

}  // namespace

StateVec NoisePredictor::flow_partial_gamma(double, const StateVec&) const {
  throw ConfigError("predictor has no analytic flow derivatives");
}

StateVec NoisePredictor::flow_jacobian_transpose_apply(double, const StateVec&, const StateVec&) const {
  throw ConfigError("predictor has no analytic flow derivatives");
}

// ---------------------------------------------------------------------------------------------
// GaussianModel

GaussianModel::GaussianModel(StateVec mean, StateVec var) : mean_(std::move(mean)), var_(std::move(var)) {
  if (mean_.size() == 0 || mean_.size() != var_.size()) {
    throw DimensionError("Gaussian model needs matching, nonempty mean and variance");
  }
  if (!((var_.array() > 0.0).all() && var_.allFinite() && mean_.allFinite())) {
    throw ConfigError("Gaussian model variances must be positive and finite");
  }
}

GaussianModel GaussianModel::isotropic(Eigen::Index dim, double var) {
  return GaussianModel(StateVec::Zero(dim), StateVec::Constant(dim, var));
}

StateVec GaussianModel::marginal_var(double gamma) const {
  return (1.0 + gamma * (var_.array() - 1.0)).matrix();
}

StateVec GaussianModel::predict(double gamma, const StateVec& x) const {
  check_gamma(gamma);
  check_dim(x, dim());
  const StateVec v = marginal_var(gamma);
  return (std::sqrt(1.0 - gamma) * (x - std::sqrt(gamma) * mean_).array() / v.array()).matrix();
}

std::optional<StateVec> GaussianModel::closed_form_flow(double gamma, const StateVec& x) const {
  check_gamma(gamma);
  check_dim(x, dim());
  const Eigen::ArrayXd v = marginal_var(gamma).array();
  const Eigen::ArrayXd slope = (var_.array() - 1.0) / (2.0 * v);
  return StateVec((slope * x.array() + mean_.array() / (2.0 * std::sqrt(gamma) * v)).matrix());
}

StateVec GaussianModel::flow_partial_gamma(double gamma, const StateVec& x) const {
  check_gamma(gamma);
  check_dim(x, dim());
  const Eigen::ArrayXd v = marginal_var(gamma).array();
  const Eigen::ArrayXd c = var_.array() - 1.0;
  const double sg = std::sqrt(gamma);
  return (-x.array() * c.square() / (2.0 * v.square()) -
          mean_.array() * (1.0 / (4.0 * gamma * sg * v) + c / (2.0 * sg * v.square())))
      .matrix();
}

StateVec GaussianModel::flow_jacobian_transpose_apply(double gamma, const StateVec& x, const StateVec& v) const {
  check_gamma(gamma);
  check_dim(x, dim());
  check_dim(v, dim());
  const Eigen::ArrayXd mv = marginal_var(gamma).array();
  return ((var_.array() - 1.0) / (2.0 * mv) * v.array()).matrix();
}

StateVec GaussianModel::exact_solution(double gamma_start, const StateVec& x_start, double gamma_end) const {
  check_gamma(gamma_start);
  check_gamma(gamma_end);
  check_dim(x_start, dim());
  if (gamma_start == gamma_end) return x_start;
  const Eigen::ArrayXd scale = (marginal_var(gamma_end).array() / marginal_var(gamma_start).array()).sqrt();
  return (std::sqrt(gamma_end) * mean_.array() +
          scale * (x_start.array() - std::sqrt(gamma_start) * mean_.array()))
      .matrix();
}

StateVec GaussianModel::sample_data(std::mt19937_64& rng) const {
  return (mean_.array() + var_.array().sqrt() * standard_normal(dim(), rng).array()).matrix();
}

// ---------------------------------------------------------------------------------------------
// GmmModel

GmmModel::GmmModel(std::vector<double> weights, std::vector<GaussianComponent> components)
    : weights_(std::move(weights)), components_(std::move(components)) {
  if (weights_.empty() || weights_.size() != components_.size()) {
    throw DimensionError("mixture needs one weight per component");
  }
  dim_ = components_.front().mean.size();
  for (const auto& c : components_) {
    if (dim_ == 0 || c.mean.size() != dim_ || c.var.size() != dim_) {
      throw DimensionError("mixture components must share a nonzero dimension");
    }
    if (!((c.var.array() > 0.0).all() && c.var.allFinite() && c.mean.allFinite())) {
      throw ConfigError("mixture variances must be positive and finite");
    }
  }
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw ConfigError("mixture weights must be nonnegative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ConfigError("mixture weights must sum to 1");
  }
}

GmmModel GmmModel::symmetric_pair(const StateVec& offset, double var) {
  const StateVec v = StateVec::Constant(offset.size(), var);
  return GmmModel({0.5, 0.5}, {{offset, v}, {-offset, v}});
}

std::vector<double> GmmModel::responsibilities(double gamma, const StateVec& x) const {
  const double sg = std::sqrt(gamma);
  std::vector<double> log_r(components_.size());
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const Eigen::ArrayXd v = 1.0 + gamma * (c.var.array() - 1.0);
    const Eigen::ArrayXd diff = x.array() - sg * c.mean.array();
    log_r[k] = (weights_[k] > 0.0 ? std::log(weights_[k]) : -INFINITY) -
               0.5 * ((2.0 * std::numbers::pi * v).log() + diff.square() / v).sum();
  }
  const double top = *std::max_element(log_r.begin(), log_r.end());
  double norm = 0.0;
  for (double& lr : log_r) {
    lr = std::exp(lr - top);
    norm += lr;
  }
  for (double& lr : log_r) lr /= norm;
  return log_r;
}

StateVec GmmModel::predict(double gamma, const StateVec& x) const {
  check_gamma(gamma);
  check_dim(x, dim_);
  const double sg = std::sqrt(gamma);
  const auto r = responsibilities(gamma, x);
  StateVec eps = StateVec::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    eps.array() += r[k] * (x.array() - sg * c.mean.array()) / (1.0 + gamma * (c.var.array() - 1.0));
  }
  return std::sqrt(1.0 - gamma) * eps;
}

std::optional<StateVec> GmmModel::closed_form_flow(double gamma, const StateVec& x) const {
  check_gamma(gamma);
  check_dim(x, dim_);
  const double sg = std::sqrt(gamma);
  const auto r = responsibilities(gamma, x);
  StateVec f = StateVec::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    const Eigen::ArrayXd v = 1.0 + gamma * (c.var.array() - 1.0);
    f.array() += r[k] * ((c.var.array() - 1.0) * x.array() / (2.0 * v) + c.mean.array() / (2.0 * sg * v));
  }
  return f;
}

StateVec GmmModel::sample_data(std::mt19937_64& rng) const {
  std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
  const auto& c = components_[pick(rng)];
  return (c.mean.array() + c.var.array().sqrt() * standard_normal(dim_, rng).array()).matrix();
}

StateVec GmmModel::data_mean() const {
  StateVec m = StateVec::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) m += weights_[k] * components_[k].mean;
  return m;
}

StateVec GmmModel::data_var() const {
  const StateVec m = data_mean();
  StateVec second = StateVec::Zero(dim_);
  for (std::size_t k = 0; k < components_.size(); ++k) {
    const auto& c = components_[k];
    second.array() += weights_[k] * (c.var.array() + c.mean.array().square());
  }
  return (second.array() - m.array().square()).matrix();
}

}  // namespace bea
