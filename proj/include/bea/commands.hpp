// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/config.hpp"
#include "bea/evaluation.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace bea {

// Random streams of the command layer. Learning uses streams 0..n_seeds-1 of the same seed, so
// sample initial states and ancestral noise live far above them.
inline constexpr std::uint64_t kSampleStreamBase = std::uint64_t{1} << 40;
inline constexpr std::uint64_t kNoiseStreamBase = std::uint64_t{1} << 41;

/// Initial state of sample i for a command run with `seed`.
StateVec sample_initial_state(Eigen::Index dim, std::uint64_t seed, std::size_t i);

/// Samples, trajectories and the per-sample NFE of one solver run.
struct SolverRun {
  std::vector<StateVec> initial;
  std::vector<StateVec> samples;
  std::vector<Trajectory> trajectories;
  std::uint64_t total_nfe = 0;
  std::string description;  // e.g. "rbe K=10 (schedule rbe, r=3.4e-03)"
};

/// Runs config.solver on n samples. rbe without a schedule file and drbe without r learn or
/// calibrate against config.learn first.
SolverRun run_solver(const RunConfig& config, const NoisePredictor& model, std::ostream& log);

/// Metrics of one sample set against the model's data distribution and per-sample oracle endpoints.
BenchmarkRow evaluate_samples(const RunConfig& config, const NoisePredictor& model, const SolverRun& run,
                              const std::string& solver, int K);

int cmd_sample(const RunConfig& config, std::ostream& log);
int cmd_learn_schedule(const RunConfig& config, std::ostream& log);
int cmd_benchmark(const RunConfig& config, std::ostream& log);
int cmd_inspect_schedule(const RunConfig& config, const std::string& path, std::ostream& log);

}  // namespace bea
