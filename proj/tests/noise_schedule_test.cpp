// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/noise_schedule.hpp"
#include "bea/types.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

namespace bea {
namespace {

// γ_i = ∏_{j≤i} (1 - β_j) with β linearly spaced, computed directly.
std::vector<double> cumulative_products(int n, double b0, double b1) {
  std::vector<double> out(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) {
    const double beta = b0 + (b1 - b0) * (i - 1) / (n - 1);
    out[i] = out[i - 1] * (1.0 - beta);
  }
  return out;
}

double cosine_oracle(double t, double s, double T) {
  auto f = [&](double u) {
    const double c = std::cos((u / T + s) / (1.0 + s) * M_PI / 2.0);
    return c * c;
  };
  return kGammaFloor + (1.0 - kGammaFloor) * f(t) / f(0.0);
}

TEST(NoiseSchedule, StartsAtOne) {
  EXPECT_EQ(NoiseSchedule::linear().gamma(0.0), 1.0);
  EXPECT_EQ(NoiseSchedule::cosine().gamma(0.0), 1.0);
}

TEST(NoiseSchedule, LinearEndMatchesCumulativeProduct) {
  const auto s = NoiseSchedule::linear();
  const auto prod = cumulative_products(1000, 1e-4, 0.02);
  EXPECT_NEAR(s.gamma(1.0) / prod.back(), 1.0, 1e-12);
  EXPECT_NEAR(s.gamma_end(), 4.0358e-5, 1e-8);
}

TEST(NoiseSchedule, LinearGridMatchesCumulativeProduct) {
  const auto s = NoiseSchedule::linear();
  const auto prod = cumulative_products(1000, 1e-4, 0.02);
  for (int i = 0; i <= 1000; i += 37) {
    EXPECT_NEAR(s.gamma(s.grid_time(i)) / prod[i], 1.0, 1e-12) << i;
    EXPECT_NEAR(s.grid_gamma(i) / prod[i], 1.0, 1e-12) << i;
  }
}

TEST(NoiseSchedule, LinearInterpolatesLogGamma) {
  const auto s = NoiseSchedule::linear(10, 1e-3, 0.2, 1.0);
  const double mid = 0.35;  // halfway between t_3 and t_4
  const double expected = std::sqrt(s.grid_gamma(3) * s.grid_gamma(4));
  EXPECT_NEAR(s.gamma(mid) / expected, 1.0, 1e-12);
}

TEST(NoiseSchedule, CosineMatchesFormula) {
  const auto s = NoiseSchedule::cosine(1000, 0.008, 2.0);
  for (double t : {0.0, 0.1, 0.7, 1.3, 1.99, 2.0}) {
    EXPECT_NEAR(s.gamma(t), cosine_oracle(t, 0.008, 2.0), 1e-14) << t;
  }
  EXPECT_NEAR(s.gamma_end(), kGammaFloor, 1e-15);
}

TEST(NoiseSchedule, FirstAlphaIsOneMinusBeta) {
  EXPECT_NEAR(NoiseSchedule::linear().alpha_at(1), 0.9999, 1e-15);
}

TEST(NoiseSchedule, AlphaIsGridRatioAndTelescopes) {
  for (const auto& s : {NoiseSchedule::linear(), NoiseSchedule::cosine()}) {
    double product = 1.0;
    for (int i = 1; i <= s.n_discrete(); ++i) {
      const double a = s.alpha_at(i);
      ASSERT_GT(a, 0.0);
      ASSERT_LT(a, 1.0);
      EXPECT_NEAR(a, s.gamma(s.grid_time(i)) / s.gamma(s.grid_time(i - 1)), 1e-12);
      product *= a;
    }
    EXPECT_NEAR(product / s.gamma(s.horizon()), 1.0, 1e-10);
  }
}

TEST(NoiseSchedule, StrictlyDecreasingOverRandomPairs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (const auto& s : {NoiseSchedule::linear(), NoiseSchedule::cosine()}) {
    for (int k = 0; k < 2000; ++k) {
      double a = u(rng), b = u(rng);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      EXPECT_GT(s.gamma(a), s.gamma(b)) << a << " " << b;
    }
  }
}

TEST(NoiseSchedule, InverseRoundTrip) {
  for (const auto& s : {NoiseSchedule::linear(), NoiseSchedule::cosine(), NoiseSchedule::linear(500, 1e-4, 0.03, 3.0),
                        NoiseSchedule::cosine(200, 0.02, 0.5)}) {
    const double T = s.horizon();
    for (int i = 0; i <= 5000; ++i) {
      const double t = T * i / 5000.0;
      EXPECT_NEAR(s.t_inverse(s.gamma(t)), t, 1e-10 * T) << t;
    }
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(std::log(s.gamma_end()), 0.0);
    for (int k = 0; k < 500; ++k) {
      const double g = std::exp(u(rng));
      EXPECT_NEAR(s.gamma(s.t_inverse(g)) / g, 1.0, 1e-10);
    }
  }
}

TEST(NoiseSchedule, InverseBoundaries) {
  for (const auto& s : {NoiseSchedule::linear(), NoiseSchedule::cosine()}) {
    EXPECT_EQ(s.t_inverse(1.0), 0.0);
    EXPECT_NEAR(s.t_inverse(s.gamma_end()), s.horizon(), 1e-12);
  }
}

TEST(NoiseSchedule, CosineInverseMatchesBisection) {
  const auto s = NoiseSchedule::cosine();
  double lo = 0.0, hi = 1.0;
  while (hi - lo > 1e-15) {
    const double mid = 0.5 * (lo + hi);
    (cosine_oracle(mid, 0.008, 1.0) > 0.5 ? lo : hi) = mid;
  }
  EXPECT_NEAR(s.t_inverse(0.5), 0.5 * (lo + hi), 1e-12);
}

TEST(NoiseSchedule, RejectsOutOfRange) {
  const auto s = NoiseSchedule::linear();
  EXPECT_THROW(s.gamma(-1e-9), DomainError);
  EXPECT_THROW(s.gamma(1.0 + 1e-9), DomainError);
  EXPECT_THROW(s.t_inverse(1.5), DomainError);
  EXPECT_THROW(s.t_inverse(0.5 * s.gamma_end()), DomainError);
  EXPECT_THROW(s.alpha_at(0), DomainError);
  EXPECT_THROW(s.alpha_at(1001), DomainError);
}

TEST(NoiseSchedule, RejectsInvalidConfigs) {
  EXPECT_THROW(NoiseSchedule::linear(1000, 1e-4, 0.05), ConfigError);  // γ_N far below the floor
  EXPECT_THROW(NoiseSchedule::linear(1000, 1e-4, 0.02, -1.0), ConfigError);
  EXPECT_THROW(NoiseSchedule::linear(0), ConfigError);
  EXPECT_THROW(NoiseSchedule::cosine(1000, -0.1), ConfigError);
  EXPECT_THROW(schedule_kind_from_string("sigmoid"), ConfigError);
}

TEST(NoiseSchedule, KindNamesRoundTrip) {
  for (auto kind : {ScheduleKind::Linear, ScheduleKind::Cosine}) {
    EXPECT_EQ(schedule_kind_from_string(to_string(kind)), kind);
  }
}

}  // namespace
}  // namespace bea
