// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace bea {

using StateVec = Eigen::VectorXd;

/// Argument outside the mathematical domain of an operation (t outside [0, T], γ ∉ (0, 1), ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Inconsistent or invalid configuration (bad thresholds, unsupported estimator, unknown keys).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Mismatched vector or list sizes.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Deterministic generator for stream `stream` of a run seeded with `seed`.
/// Streams are independent of each other and of the thread that consumes them.
inline std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    0x62656173u};
  return std::mt19937_64(seq);
}

/// x ~ N(0, I) in `dim` dimensions.
inline StateVec standard_normal(Eigen::Index dim, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  StateVec x(dim);
  for (Eigen::Index k = 0; k < dim; ++k) {
    x[k] = normal(rng);
  }
  return x;
}

inline bool all_finite(const StateVec& x) { return x.allFinite(); }

}  // namespace bea
