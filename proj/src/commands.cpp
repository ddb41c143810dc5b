// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/commands.hpp"

#include "bea/csv.hpp"
#include "bea/parallel.hpp"
#include "bea/schedule_file.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

namespace bea {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) { return csv::format_double(v); }

fs::path output_path(const RunConfig& config, const std::string& name) {
  const fs::path dir(config.output.dir);
  fs::create_directories(dir);
  return dir / name;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

void echo_config(const RunConfig& config) {
  auto out = open_output(output_path(config, "resolved_config.json"));
  out << to_json(config).dump(2) << '\n';
}

TargetSampler target_sampler(const NoisePredictor& model) {
  if (const auto* g = dynamic_cast<const GaussianModel*>(&model)) {
    return [g](std::mt19937_64& rng) { return g->sample_data(rng); };
  }
  if (const auto* m = dynamic_cast<const GmmModel*>(&model)) {
    return [m](std::mt19937_64& rng) { return m->sample_data(rng); };
  }
  throw ConfigError("no data sampler for this model");
}

InferenceSchedule learn_schedule_for(const RunConfig& config, const FlowField& field, const NoiseSchedule& schedule,
                                     int K, std::ostream& log, std::string& note) {
  const ScheduleLearnConfig cfg = build_learn_config(config, K);
  const double r = config.solver.r ? *config.solver.r : calibrate_threshold(field, schedule, cfg).r;
  const LearnedSchedule learned = learn_rbe_schedule(field, schedule, cfg, r);
  log << "learned " << K << "-step schedule: r=" << fmt(r) << ", kept " << learned.n_kept << " of "
      << learned.n_seeds << " runs\n";
  note = "schedule rbe, r=" + fmt(r);
  return learned.schedule;
}

}  // namespace

StateVec sample_initial_state(Eigen::Index dim, std::uint64_t seed, std::size_t i) {
  auto rng = make_rng(seed, kSampleStreamBase + i);
  return standard_normal(dim, rng);
}

SolverRun run_solver(const RunConfig& config, const NoisePredictor& model, std::ostream& log) {
  if (config.n_samples < 1) throw ConfigError("n_samples must be >= 1");
  const SolverSpec& spec = config.solver;
  if (spec.K < 1) throw ConfigError("solver K must be >= 1");
  NoiseSchedule schedule(config.noise_schedule);
  const FlowField field(model);

  SolverRun run;
  const auto n = static_cast<std::size_t>(config.n_samples);
  run.initial.resize(n);
  for (std::size_t i = 0; i < n; ++i) run.initial[i] = sample_initial_state(model.dim(), config.seed, i);
  run.samples.resize(n);
  run.trajectories.resize(n);

  std::function<SampleResult(std::size_t)> one;
  std::string note;
  int K = spec.K;

  switch (spec.kind) {
    case SolverKind::Rbe:
    case SolverKind::Ddim: {
      std::optional<InferenceSchedule> inference;
      if (!spec.schedule_file.empty()) {
        const ScheduleFile file = read_schedule_file(spec.schedule_file);
        schedule = NoiseSchedule(file.noise_schedule);
        inference = file.inference_schedule();
        note = "schedule " + spec.schedule_file;
      } else if (spec.kind == SolverKind::Rbe) {
        inference = learn_schedule_for(config, field, schedule, spec.K, log, note);
      } else if (spec.spacing == "uniform-time") {
        inference = InferenceSchedule::uniform_time(schedule, spec.K);
        note = "uniform-time";
      } else if (spec.spacing == "uniform-gamma") {
        inference = InferenceSchedule::uniform_gamma(schedule, spec.K);
        note = "uniform-gamma";
      } else {
        throw ConfigError("unknown spacing '" + spec.spacing + "'");
      }
      K = inference->steps();
      const bool euler = spec.kind == SolverKind::Rbe;
      one = [&field, inference, euler, &run](std::size_t i) {
        return euler ? rbe_sample(field, *inference, run.initial[i]) : ddim_sample(field, *inference, run.initial[i]);
      };
      break;
    }
    case SolverKind::Drbe: {
      DrbeOptions options = build_drbe_options(spec);
      check_estimator_supported(options.estimator, model);
      if (!spec.r) {
        const ScheduleLearnConfig cfg = build_learn_config(config, spec.K);
        options.threshold_r = calibrate_threshold(field, schedule, cfg).r;
        log << "calibrated r=" << fmt(options.threshold_r) << " for median " << spec.K << " steps\n";
      }
      note = "r=" + fmt(options.threshold_r);
      if (spec.r) K = 0;
      one = [&field, options, &schedule, &run](std::size_t i) {
        return drbe_sample(field, options, schedule, run.initial[i]);
      };
      break;
    }
    case SolverKind::Ancestral: {
      const auto variance = spec.ancestral_variance;
      note = "variance " + std::string(to_string(variance));
      one = [&field, &schedule, K, variance, &run, &config](std::size_t i) {
        return ancestral_sample(field, schedule, K, run.initial[i], config.seed ^ (kNoiseStreamBase + i), variance);
      };
      break;
    }
    case SolverKind::Reference: {
      const int n_fine = spec.n_fine;
      note = "n_fine=" + std::to_string(n_fine);
      K = n_fine;
      one = [&field, &schedule, n_fine, &run](std::size_t i) {
        FlowField local = field;
        local.reset_counters();
        const double g0 = schedule.gamma_end();
        SampleResult result;
        result.x = reference_solve(local, g0, 1.0, run.initial[i], n_fine);
        result.trajectory.records.push_back({schedule.horizon(), g0, run.initial[i], 1.0 - g0, std::nullopt});
        result.trajectory.records.push_back({0.0, 1.0, result.x, 0.0, std::nullopt});
        result.trajectory.nfe = local.evaluations();
        return result;
      };
      break;
    }
  }

  parallel_for(n, [&](std::size_t i) {
    SampleResult result = one(i);
    if (spec.kind != SolverKind::Ancestral) result.trajectory.seed = config.seed;
    run.samples[i] = std::move(result.x);
    run.trajectories[i] = std::move(result.trajectory);
  });
  for (const auto& t : run.trajectories) run.total_nfe += t.nfe;
  run.description = std::string(to_string(spec.kind)) + (K > 0 ? " K=" + std::to_string(K) : std::string()) + " (" +
                    note + ")";
  return run;
}

BenchmarkRow evaluate_samples(const RunConfig& config, const NoisePredictor& model, const SolverRun& run,
                              const std::string& solver, int K) {
  const auto n = run.samples.size();
  const NoiseSchedule schedule(config.noise_schedule);
  const double g0 = schedule.gamma_end();
  std::vector<StateVec> oracle(n);
  const auto* gaussian = dynamic_cast<const GaussianModel*>(&model);
  const FlowField field(model);
  const int n_fine = config.benchmark.oracle_n_fine;
  parallel_for(n, [&](std::size_t i) {
    oracle[i] = gaussian ? gaussian->exact_solution(g0, run.initial[i], 1.0)
                         : reference_solve(field, g0, 1.0, run.initial[i], n_fine);
  });

  BenchmarkRow row;
  row.solver = solver;
  row.K = K;
  row.nfe = n == 0 ? 0 : (run.total_nfe + n / 2) / n;
  row.endpoint_rmse = endpoint_rmse(run.samples, oracle);
  const TargetMoments target = target_moments(model);
  const EmpiricalMoments moments = empirical_moments(run.samples);
  row.mean_err = (moments.mean - target.mean).norm();
  row.cov_err = (moments.var() - target.var).norm();
  if (gaussian) {
    row.w2 = gaussian_w2(moments.mean, moments.var(), target.mean, target.var);
  } else {
    row.w2 = sliced_w2(run.samples, target_sampler(model), config.benchmark.sliced_projections, config.seed);
  }
  row.n_samples = static_cast<int>(n);
  row.seed = config.seed;
  return row;
}

int cmd_sample(const RunConfig& config, std::ostream& log) {
  const auto model = build_model(config.model);
  const SolverRun run = run_solver(config, *model, log);

  {
    auto out = open_output(output_path(config, "samples.csv"));
    std::vector<std::string> header;
    for (Eigen::Index j = 0; j < model->dim(); ++j) header.push_back("x_" + std::to_string(j));
    csv::write_row(out, header);
    for (const auto& x : run.samples) {
      std::vector<std::string> fields;
      for (Eigen::Index j = 0; j < x.size(); ++j) fields.push_back(fmt(x[j]));
      csv::write_row(out, fields);
    }
  }
  const auto n_traj = std::min<std::size_t>(static_cast<std::size_t>(std::max(config.output.trajectories, 0)),
                                            run.trajectories.size());
  for (std::size_t i = 0; i < n_traj; ++i) {
    auto out = open_output(output_path(config, "trajectory_" + std::to_string(i) + ".csv"));
    write_trajectory_csv(out, run.trajectories[i]);
  }
  echo_config(config);

  const auto n = run.samples.size();
  log << run.description << ": " << n << " samples, " << run.total_nfe << " predictor evaluations ("
      << fmt(static_cast<double>(run.total_nfe) / static_cast<double>(n)) << " per sample)\n";
  log << "wrote " << output_path(config, "samples.csv").string() << '\n';
  return 0;
}

int cmd_learn_schedule(const RunConfig& config, std::ostream& log) {
  const auto model = build_model(config.model);
  const NoiseSchedule schedule(config.noise_schedule);
  const FlowField field(*model);
  const ScheduleLearnConfig cfg = build_learn_config(config, config.solver.K);
  check_estimator_supported(cfg.drbe.estimator, *model);

  double r = 0.0;
  if (config.solver.r) {
    r = *config.solver.r;
    log << "using r=" << fmt(r) << '\n';
  } else {
    const CalibrationResult calibration = calibrate_threshold(field, schedule, cfg);
    r = calibration.r;
    log << "calibrated r=" << fmt(r) << " (median " << calibration.achieved_K << " steps over " << cfg.probe_size
        << " probe runs)\n";
  }
  const LearnedSchedule learned = learn_rbe_schedule(field, schedule, cfg, r);
  const ScheduleFile file = ScheduleFile::from_learned(learned, schedule);
  const fs::path path = output_path(config, config.output.schedule_file);
  write_schedule_file(path.string(), file);
  echo_config(config);

  log << "kept " << learned.n_kept << " of " << learned.n_seeds << " runs, discard rate "
      << fmt(learned.discard_fraction()) << '\n';
  log << "step counts:";
  for (const auto& [steps, count] : learned.length_histogram) log << ' ' << steps << ':' << count;
  log << '\n';
  log << "wrote " << path.string() << " (" << file.times.size() << " knots)\n";
  return 0;
}

namespace {

/// Maps a benchmark solver label to the solver spec it runs with NFE budget `nfe`.
RunConfig benchmark_config(const RunConfig& base, const std::string& label, int nfe) {
  RunConfig config = base;
  config.solver.K = nfe;
  config.solver.schedule_file.clear();
  if (label == "rbe") {
    config.solver.kind = SolverKind::Rbe;
    config.solver.r.reset();
  } else if (label == "drbe") {
    config.solver.kind = SolverKind::Drbe;
    config.solver.r.reset();
  } else if (label == "ddim-uniform-t") {
    config.solver.kind = SolverKind::Ddim;
    config.solver.spacing = "uniform-time";
  } else if (label == "ddim-uniform-gamma") {
    config.solver.kind = SolverKind::Ddim;
    config.solver.spacing = "uniform-gamma";
  } else if (label == "ancestral") {
    config.solver.kind = SolverKind::Ancestral;
  } else {
    throw ConfigError("unknown benchmark solver '" + label + "'");
  }
  return config;
}

}  // namespace

int cmd_benchmark(const RunConfig& config, std::ostream& log) {
  const auto model = build_model(config.model);
  for (const auto& label : config.benchmark.solvers) benchmark_config(config, label, 1);

  BenchmarkReport report;
  json failures = json::array();
  std::ostringstream quiet;
  for (const auto& label : config.benchmark.solvers) {
    for (const int nfe : config.benchmark.nfe) {
      const RunConfig cfg = benchmark_config(config, label, nfe);
      const auto start = std::chrono::steady_clock::now();
      try {
        const SolverRun run = run_solver(cfg, *model, quiet);
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        BenchmarkRow row = evaluate_samples(cfg, *model, run, label, nfe);
        row.wall_time_ms = ms;
        log << label << " NFE=" << nfe << ": nfe/sample " << row.nfe << ", w2 " << fmt(row.w2) << ", rmse "
            << fmt(row.endpoint_rmse) << '\n';
        report.rows.push_back(std::move(row));
      } catch (const std::runtime_error& e) {
        // Schedule learning or calibration can fail for a single grid cell; the row stays in the
        // report with NaN metrics and the reason goes to the summary.
        const double nan = std::numeric_limits<double>::quiet_NaN();
        report.rows.push_back({label, nfe, 0, nan, nan, nan, nan, nan, cfg.n_samples, cfg.seed});
        failures.push_back({{"solver", label}, {"nfe", nfe}, {"error", e.what()}});
        log << label << " NFE=" << nfe << ": failed: " << e.what() << '\n';
      }
    }
  }

  const fs::path report_path = output_path(config, "report.csv");
  {
    auto out = open_output(report_path);
    report.write_csv(out);
  }
  {
    auto out = open_output(output_path(config, "summary.json"));
    const json summary = {{"config", to_json(config)},
                          {"rows", report.rows.size()},
                          {"report", report_path.filename().string()},
                          {"failures", failures}};
    out << summary.dump(2) << '\n';
  }
  echo_config(config);
  log << "wrote " << report_path.string() << " (" << report.rows.size() << " rows)\n";
  return failures.empty() ? 0 : 3;
}

int cmd_inspect_schedule(const RunConfig& config, const std::string& path, std::ostream& log) {
  const ScheduleFile file = read_schedule_file(path);
  const InferenceSchedule inference = file.inference_schedule();
  log << "schedule " << path << ": provenance " << file.provenance << ", " << inference.steps() << " steps, "
      << to_string(file.noise_schedule.kind) << " noise schedule\n";
  log << "k,t,gamma\n";
  for (std::size_t k = 0; k < file.times.size(); ++k) {
    log << k + 1 << ',' << fmt(file.times[k]) << ',' << fmt(file.gammas[k]) << '\n';
  }

  const NoiseSchedule noise(file.noise_schedule);
  const auto rows = compare_schedules(inference, noise);
  const fs::path grid_path = output_path(config, config.output.grid_file);
  auto out = open_output(grid_path);
  csv::write_row(out, {"t", "gamma_rbe", "gamma_linear", "gamma_cosine"});
  for (const auto& row : rows) {
    csv::write_row(out, {fmt(row.t), fmt(row.gamma_rbe), fmt(row.gamma_linear), fmt(row.gamma_cosine)});
  }
  log << "wrote " << grid_path.string() << '\n';
  return 0;
}

}  // namespace bea
