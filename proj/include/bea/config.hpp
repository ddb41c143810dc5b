// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "bea/analytic_models.hpp"
#include "bea/noise_schedule.hpp"
#include "bea/schedule_learning.hpp"
#include "bea/solvers.hpp"

#include <json.hpp>

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bea {

enum class ModelKind { Gaussian, Gmm };

struct ModelSpec {
  ModelKind kind = ModelKind::Gaussian;
  int dim = 1;
  // Gaussian: per-coordinate mean and variance (one entry broadcasts to all coordinates).
  std::vector<double> mean{0.0};
  std::vector<double> var{4.0};
  // Gmm: explicit components, or a symmetric pair at ±offset when components is empty.
  std::vector<double> offset{3.0};
  std::vector<double> component_var{1.0};
  std::vector<double> weights;
  std::vector<GaussianComponent> components;
};

enum class SolverKind { Rbe, Drbe, Ddim, Ancestral, Reference };

std::string_view to_string(SolverKind kind);
SolverKind solver_kind_from_string(std::string_view name);

struct SolverSpec {
  SolverKind kind = SolverKind::Rbe;
  int K = 10;
  std::optional<double> r;  // DRBE threshold; calibrated to K when absent
  CorrectionMethod estimator = CorrectionMethod::SymmetricJacobianFD;
  CorrectionNorm norm = CorrectionNorm::Rms;
  double first_step_cap = 1.0;
  double h_min = 1e-6;
  std::string schedule_file;  // rbe / ddim: fixed inference schedule to load
  std::string spacing = "uniform-time";  // ddim without a schedule file: uniform-time | uniform-gamma
  AncestralVariance ancestral_variance = AncestralVariance::Small;
  int n_fine = 10000;
};

struct LearnSpec {
  int seeds = 64;
  int probe_size = 33;
  double r_init = 1e-3;
  double r_lo = 1e-8;
  double r_hi = 1e4;
  int max_bisect_iters = 40;
  double min_kept_fraction = 0.5;
};

struct BenchmarkSpec {
  std::vector<std::string> solvers{"rbe", "drbe", "ddim-uniform-t", "ancestral"};
  std::vector<int> nfe{8, 10, 12, 15, 20, 50};
  int oracle_n_fine = 10000;
  int sliced_projections = 64;
};

struct OutputSpec {
  std::string dir = "out";
  std::string schedule_file = "rbe_schedule.sched";
  std::string grid_file = "schedule_grid.csv";
  int trajectories = 4;  // trajectory CSVs written by `sample`
};

/// Fully resolved run configuration. Every field has a default; files may set any subset.
struct RunConfig {
  ModelSpec model;
  NoiseScheduleSpec noise_schedule;
  SolverSpec solver;
  LearnSpec learn;
  BenchmarkSpec benchmark;
  OutputSpec output;
  int n_samples = 1000;
  std::uint64_t seed = 0;
};

/// Applies the keys present in `doc` on top of `config`. Unknown keys throw ConfigError.
void apply_json(RunConfig& config, const nlohmann::json& doc);
RunConfig load_config_file(const std::string& path, RunConfig base = {});
nlohmann::json to_json(const RunConfig& config);

std::unique_ptr<NoisePredictor> build_model(const ModelSpec& spec);
ScheduleLearnConfig build_learn_config(const RunConfig& config, int target_K);
DrbeOptions build_drbe_options(const SolverSpec& spec);

/// Target data moments used by the distributional metrics.
struct TargetMoments {
  StateVec mean;
  StateVec var;
};
TargetMoments target_moments(const NoisePredictor& model);

}  // namespace bea
