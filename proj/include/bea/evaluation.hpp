// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/types.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace bea {

/// RMS over pairs of ‖a_i - b_i‖₂/√d.
double endpoint_rmse(std::span<const StateVec> samples, std::span<const StateVec> oracle);

/// Closed-form W2 between N(μa, diag(va)) and N(μb, diag(vb)):
/// √(‖μa - μb‖² + Σ(√va - √vb)²).
double gaussian_w2(const StateVec& mean_a, const StateVec& var_a, const StateVec& mean_b, const StateVec& var_b);

struct EmpiricalMoments {
  StateVec mean;
  Eigen::MatrixXd cov;  // unbiased

  StateVec var() const { return cov.diagonal(); }
  /// Frobenius norm of the off-diagonal part.
  double off_diagonal_norm() const;
};

EmpiricalMoments empirical_moments(std::span<const StateVec> samples);

using TargetSampler = std::function<StateVec(std::mt19937_64&)>;

/// Mean over n_projections random unit directions of the 1-D W2 distance between the projected
/// samples and an equal number of projected target draws. Deterministic given seed.
double sliced_w2(std::span<const StateVec> samples, const TargetSampler& target, int n_projections,
                 std::uint64_t seed);

/// Same metric between two fixed sample sets of equal size.
double sliced_w2(std::span<const StateVec> samples, std::span<const StateVec> reference, int n_projections,
                 std::uint64_t seed);

struct ConvergenceOrder {
  bool exact = false;  // every error at or below the exactness floor
  double order = 0.0;
};

/// Least-squares slope of log(error(K)) against log(1/K). K_list must be geometric with >= 3 entries.
ConvergenceOrder convergence_order(std::span<const int> K_list, const std::function<double(int)>& error_at,
                                   double exact_floor = 1e-14);

struct BenchmarkRow {
  std::string solver;
  int K = 0;
  std::uint64_t nfe = 0;
  double endpoint_rmse = 0.0;
  double w2 = 0.0;
  double mean_err = 0.0;
  double cov_err = 0.0;
  double wall_time_ms = 0.0;
  int n_samples = 0;
  std::uint64_t seed = 0;
};

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;

  static constexpr const char* kHeader =
      "solver,K,nfe,endpoint_rmse,w2,mean_err,cov_err,wall_time_ms,n_samples,seed";

  void write_csv(std::ostream& out) const;
};

}  // namespace bea
