// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

// bea: sampling, schedule learning, benchmarking and schedule inspection on analytic models.

#include "bea/commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

// Values given on the command line. Unset options leave the config file / defaults alone.
struct Flags {
  std::string config_path;
  std::optional<std::string> model, noise_schedule, solver, estimator, norm, schedule_file, out, spacing;
  std::optional<int> dim, K, n, seeds, n_fine, trajectories;
  std::optional<double> r, first_step_cap, h_min;
  std::optional<std::vector<double>> mean, var, offset;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<std::string>> solvers;
  std::optional<std::vector<int>> nfe;
  std::optional<std::string> grid;
};

template <typename T>
void opt(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
  app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

void add_common(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON run config; flags override its fields");
  opt(app, "--model", f.model, "gaussian | gmm");
  opt(app, "--dim", f.dim, "state dimension");
  opt(app, "--mean", f.mean, "Gaussian mean (one value or dim values)");
  opt(app, "--var", f.var, "Gaussian variance, or GMM component variance");
  opt(app, "--offset", f.offset, "GMM component means at +-offset");
  opt(app, "--noise-schedule", f.noise_schedule, "linear | cosine");
  opt(app, "--seed", f.seed, "random seed");
  opt(app, "--out", f.out, "output directory");
  opt(app, "--estimator", f.estimator, "analytic | symmetric-jacobian-fd | full-gradient-fd");
  opt(app, "--norm", f.norm, "rms | l2 | linf");
  opt(app, "--r", f.r, "DRBE threshold (skips calibration)");
  opt(app, "--first-step-cap", f.first_step_cap, "DRBE first step cap as a fraction of 1 - gamma");
  opt(app, "--h-min", f.h_min, "DRBE minimum step");
  opt(app, "--seeds", f.seeds, "DRBE runs averaged into a learned schedule");
}

void apply_flags(bea::RunConfig& c, const Flags& f) {
  if (f.model) {
    if (*f.model == "gaussian") {
      c.model.kind = bea::ModelKind::Gaussian;
    } else if (*f.model == "gmm") {
      c.model.kind = bea::ModelKind::Gmm;
    } else {
      throw bea::ConfigError("unknown model '" + *f.model + "'");
    }
  }
  if (f.dim) c.model.dim = *f.dim;
  if (f.mean) c.model.mean = *f.mean;
  if (f.var) {
    if (c.model.kind == bea::ModelKind::Gmm) {
      c.model.component_var = *f.var;
    } else {
      c.model.var = *f.var;
    }
  }
  if (f.offset) c.model.offset = *f.offset;
  if (f.noise_schedule) c.noise_schedule.kind = bea::schedule_kind_from_string(*f.noise_schedule);
  if (f.solver) c.solver.kind = bea::solver_kind_from_string(*f.solver);
  if (f.K) c.solver.K = *f.K;
  if (f.r) c.solver.r = *f.r;
  if (f.estimator) c.solver.estimator = bea::correction_method_from_string(*f.estimator);
  if (f.norm) c.solver.norm = bea::correction_norm_from_string(*f.norm);
  if (f.first_step_cap) c.solver.first_step_cap = *f.first_step_cap;
  if (f.h_min) c.solver.h_min = *f.h_min;
  if (f.schedule_file) c.solver.schedule_file = *f.schedule_file;
  if (f.spacing) c.solver.spacing = *f.spacing;
  if (f.n_fine) c.solver.n_fine = *f.n_fine;
  if (f.n) c.n_samples = *f.n;
  if (f.seed) c.seed = *f.seed;
  if (f.seeds) c.learn.seeds = *f.seeds;
  if (f.out) c.output.dir = *f.out;
  if (f.trajectories) c.output.trajectories = *f.trajectories;
  if (f.solvers) c.benchmark.solvers = *f.solvers;
  if (f.nfe) c.benchmark.nfe = *f.nfe;
  if (f.grid) c.output.grid_file = *f.grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Backward-error-restricted samplers for diffusion ODEs on analytic models"};
  app.require_subcommand(1);
  Flags flags;

  auto* sample = app.add_subcommand("sample", "draw samples with one solver");
  add_common(sample, flags);
  opt(sample, "--solver", flags.solver, "rbe | drbe | ddim | ancestral | reference");
  opt(sample, "--k", flags.K, "steps (rbe, ddim, ancestral) or DRBE calibration target");
  opt(sample, "--schedule-file", flags.schedule_file, "learned schedule for rbe / ddim");
  opt(sample, "--spacing", flags.spacing, "ddim spacing without a schedule file: uniform-time | uniform-gamma");
  opt(sample, "--n", flags.n, "number of samples");
  opt(sample, "--n-fine", flags.n_fine, "RK4 steps of the reference solver");
  opt(sample, "--trajectories", flags.trajectories, "trajectory CSVs to write");

  auto* learn = app.add_subcommand("learn-schedule", "calibrate r and learn an averaged DRBE schedule");
  add_common(learn, flags);
  opt(learn, "--target-k", flags.K, "steps of the learned schedule");

  auto* bench = app.add_subcommand("benchmark", "run the solver x NFE grid against the oracle");
  add_common(bench, flags);
  opt(bench, "--solvers", flags.solvers, "rbe drbe ddim-uniform-t ddim-uniform-gamma ancestral");
  opt(bench, "--nfe", flags.nfe, "NFE budgets");
  opt(bench, "--n", flags.n, "samples per row");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect-schedule", "validate a schedule file and export a comparison grid");
  inspect->add_option("path", inspect_path, "schedule file")->required();
  opt(inspect, "--out", flags.out, "output directory");
  opt(inspect, "--grid", flags.grid, "grid CSV file name");

  CLI11_PARSE(app, argc, argv);

  try {
    bea::RunConfig config;
    if (!flags.config_path.empty()) config = bea::load_config_file(flags.config_path);
    apply_flags(config, flags);
    if (sample->parsed()) return bea::cmd_sample(config, std::cout);
    if (learn->parsed()) return bea::cmd_learn_schedule(config, std::cout);
    if (bench->parsed()) return bea::cmd_benchmark(config, std::cout);
    return bea::cmd_inspect_schedule(config, inspect_path, std::cout);
  } catch (const bea::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
