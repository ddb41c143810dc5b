// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/evaluation.hpp"

#include "bea/csv.hpp"

#include <algorithm>
#include <cmath>

namespace bea {

double endpoint_rmse(std::span<const StateVec> samples, std::span<const StateVec> oracle) {
  if (samples.size() != oracle.size()) {
    throw DimensionError("endpoint_rmse: sample and oracle lists differ in length");
  }
  if (samples.empty()) throw DimensionError("endpoint_rmse: empty sample list");
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i].size() != oracle[i].size()) throw DimensionError("endpoint_rmse: dimension mismatch");
    total += (samples[i] - oracle[i]).squaredNorm() / static_cast<double>(samples[i].size());
  }
  return std::sqrt(total / static_cast<double>(samples.size()));
}

double gaussian_w2(const StateVec& mean_a, const StateVec& var_a, const StateVec& mean_b, const StateVec& var_b) {
  const auto d = mean_a.size();
  if (var_a.size() != d || mean_b.size() != d || var_b.size() != d) {
    throw DimensionError("gaussian_w2: dimension mismatch");
  }
  if (!((var_a.array() > 0.0).all() && (var_b.array() > 0.0).all())) {
    throw DomainError("gaussian_w2: variances must be positive");
  }
  const double mean_part = (mean_a - mean_b).squaredNorm();
  const double var_part = (var_a.array().sqrt() - var_b.array().sqrt()).square().sum();
  return std::sqrt(mean_part + var_part);
}

double EmpiricalMoments::off_diagonal_norm() const {
  Eigen::MatrixXd off = cov;
  off.diagonal().setZero();
  return off.norm();
}

EmpiricalMoments empirical_moments(std::span<const StateVec> samples) {
  if (samples.size() < 2) throw DimensionError("empirical_moments needs at least two samples");
  const auto d = samples.front().size();
  StateVec mean = StateVec::Zero(d);
  for (const auto& s : samples) {
    if (s.size() != d) throw DimensionError("empirical_moments: dimension mismatch");
    mean += s;
  }
  mean /= static_cast<double>(samples.size());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(d, d);
  for (const auto& s : samples) {
    const StateVec c = s - mean;
    cov.noalias() += c * c.transpose();
  }
  cov /= static_cast<double>(samples.size() - 1);
  return {std::move(mean), std::move(cov)};
}

namespace {

StateVec random_direction(Eigen::Index dim, std::mt19937_64& rng) {
  while (true) {
    StateVec u = standard_normal(dim, rng);
    const double n = u.norm();
    if (n > 1e-12) return u / n;
  }
}

double projected_w2(std::span<const StateVec> a, std::span<const StateVec> b, const StateVec& dir) {
  std::vector<double> pa(a.size());
  std::vector<double> pb(b.size());
  for (std::size_t i = 0; i < a.size(); ++i) pa[i] = a[i].dot(dir);
  for (std::size_t i = 0; i < b.size(); ++i) pb[i] = b[i].dot(dir);
  std::sort(pa.begin(), pa.end());
  std::sort(pb.begin(), pb.end());
  double total = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) total += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  return std::sqrt(total / static_cast<double>(pa.size()));
}

}  // namespace

double sliced_w2(std::span<const StateVec> samples, std::span<const StateVec> reference, int n_projections,
                 std::uint64_t seed) {
  if (samples.empty() || reference.empty()) throw DimensionError("sliced_w2: empty sample set");
  if (samples.size() != reference.size()) throw DimensionError("sliced_w2: sample sets differ in size");
  if (n_projections < 16) throw ConfigError("sliced_w2 needs at least 16 projections");
  const auto d = samples.front().size();
  auto rng = make_rng(seed, 0x736c6963ULL);
  double total = 0.0;
  for (int p = 0; p < n_projections; ++p) {
    total += projected_w2(samples, reference, random_direction(d, rng));
  }
  return total / n_projections;
}

double sliced_w2(std::span<const StateVec> samples, const TargetSampler& target, int n_projections,
                 std::uint64_t seed) {
  if (samples.empty()) throw DimensionError("sliced_w2: empty sample set");
  auto rng = make_rng(seed, 0x74617267ULL);
  std::vector<StateVec> reference;
  reference.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) reference.push_back(target(rng));
  return sliced_w2(samples, std::span<const StateVec>(reference), n_projections, seed);
}

ConvergenceOrder convergence_order(std::span<const int> K_list, const std::function<double(int)>& error_at,
                                   double exact_floor) {
  if (K_list.size() < 3) throw ConfigError("convergence_order needs at least three K values");
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    if (K_list[i] < 1) throw ConfigError("convergence_order: K values must be positive");
    if (i >= 2) {
      const double r0 = static_cast<double>(K_list[i - 1]) / K_list[i - 2];
      const double r1 = static_cast<double>(K_list[i]) / K_list[i - 1];
      if (std::abs(r1 - r0) > 1e-9 * r0 || r0 <= 1.0) throw ConfigError("convergence_order: K_list must be geometric");
    }
  }
  std::vector<double> errors;
  errors.reserve(K_list.size());
  bool exact = true;
  for (int K : K_list) {
    const double e = error_at(K);
    if (e > exact_floor) exact = false;
    errors.push_back(e);
  }
  if (exact) return {true, 0.0};

  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(K_list.size());
  for (std::size_t i = 0; i < K_list.size(); ++i) {
    const double lx = -std::log(static_cast<double>(K_list[i]));
    const double ly = std::log(std::max(errors[i], 1e-300));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return {false, (n * sxy - sx * sy) / (n * sxx - sx * sx)};
}

void BenchmarkReport::write_csv(std::ostream& out) const {
  out << kHeader << '\n';
  for (const auto& r : rows) {
    csv::write_row(out, {r.solver, std::to_string(r.K), std::to_string(r.nfe), csv::format_double(r.endpoint_rmse),
                         csv::format_double(r.w2), csv::format_double(r.mean_err), csv::format_double(r.cov_err),
                         csv::format_double(r.wall_time_ms), std::to_string(r.n_samples), std::to_string(r.seed)});
  }
}

}  // namespace bea
