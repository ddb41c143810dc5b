// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/config.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace bea {

using nlohmann::json;

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Rbe:
      return "rbe";
    case SolverKind::Drbe:
      return "drbe";
    case SolverKind::Ddim:
      return "ddim";
    case SolverKind::Ancestral:
      return "ancestral";
    case SolverKind::Reference:
      return "reference";
  }
  return "unknown";
}

SolverKind solver_kind_from_string(std::string_view name) {
  if (name == "rbe") return SolverKind::Rbe;
  if (name == "drbe") return SolverKind::Drbe;
  if (name == "ddim") return SolverKind::Ddim;
  if (name == "ancestral") return SolverKind::Ancestral;
  if (name == "reference") return SolverKind::Reference;
  throw ConfigError("unknown solver '" + std::string(name) + "'");
}

namespace {

void check_keys(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + where + "." + key + "'");
    }
  }
}

std::vector<double> scalar_or_list(const json& value) {
  if (value.is_number()) return {value.get<double>()};
  return value.get<std::vector<double>>();
}

json list_json(const std::vector<double>& v) { return v.size() == 1 ? json(v.front()) : json(v); }

StateVec broadcast(const std::vector<double>& values, int dim, const char* what) {
  if (values.size() == 1) return StateVec::Constant(dim, values.front());
  if (values.size() != static_cast<std::size_t>(dim)) {
    throw ConfigError(std::string(what) + " needs 1 or dim entries");
  }
  return Eigen::Map<const StateVec>(values.data(), dim);
}

template <typename T>
void read(const json& obj, const char* key, T& out) {
  if (obj.contains(key)) out = obj.at(key).get<T>();
}

void apply_model(ModelSpec& m, const json& j) {
  check_keys(j, {"kind", "dim", "mean", "var", "offset", "component_var", "weights", "components"}, "model");
  if (j.contains("kind")) {
    const auto kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") {
      m.kind = ModelKind::Gaussian;
    } else if (kind == "gmm") {
      m.kind = ModelKind::Gmm;
    } else {
      throw ConfigError("unknown model kind '" + kind + "'");
    }
  }
  read(j, "dim", m.dim);
  if (j.contains("mean")) m.mean = scalar_or_list(j.at("mean"));
  if (j.contains("var")) m.var = scalar_or_list(j.at("var"));
  if (j.contains("offset")) m.offset = scalar_or_list(j.at("offset"));
  if (j.contains("component_var")) m.component_var = scalar_or_list(j.at("component_var"));
  read(j, "weights", m.weights);
  if (j.contains("components")) {
    m.components.clear();
    for (const auto& c : j.at("components")) {
      check_keys(c, {"mean", "var"}, "model.components[]");
      const auto mean = c.at("mean").get<std::vector<double>>();
      const auto var = c.at("var").get<std::vector<double>>();
      m.components.push_back({Eigen::Map<const StateVec>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                              Eigen::Map<const StateVec>(var.data(), static_cast<Eigen::Index>(var.size()))});
    }
  }
}

void apply_noise_schedule(NoiseScheduleSpec& s, const json& j) {
  check_keys(j, {"kind", "T", "N", "beta_start", "beta_end", "s"}, "noise_schedule");
  if (j.contains("kind")) s.kind = schedule_kind_from_string(j.at("kind").get<std::string>());
  read(j, "T", s.horizon);
  read(j, "N", s.n_discrete);
  read(j, "beta_start", s.linear.beta_start);
  read(j, "beta_end", s.linear.beta_end);
  read(j, "s", s.cosine.offset);
}

void apply_solver(SolverSpec& s, const json& j) {
  check_keys(j,
             {"kind", "K", "r", "estimator", "norm", "first_step_cap", "h_min", "schedule_file", "spacing",
              "ancestral_variance", "n_fine"},
             "solver");
  if (j.contains("kind")) s.kind = solver_kind_from_string(j.at("kind").get<std::string>());
  read(j, "K", s.K);
  if (j.contains("r")) {
    if (j.at("r").is_null()) {
      s.r.reset();
    } else {
      s.r = j.at("r").get<double>();
    }
  }
  if (j.contains("estimator")) s.estimator = correction_method_from_string(j.at("estimator").get<std::string>());
  if (j.contains("norm")) s.norm = correction_norm_from_string(j.at("norm").get<std::string>());
  read(j, "first_step_cap", s.first_step_cap);
  read(j, "h_min", s.h_min);
  read(j, "schedule_file", s.schedule_file);
  read(j, "spacing", s.spacing);
  if (j.contains("ancestral_variance")) {
    s.ancestral_variance = ancestral_variance_from_string(j.at("ancestral_variance").get<std::string>());
  }
  read(j, "n_fine", s.n_fine);
}

void apply_learn(LearnSpec& l, const json& j) {
  check_keys(j, {"seeds", "probe_size", "r_init", "r_lo", "r_hi", "max_bisect_iters", "min_kept_fraction"},
             "learn");
  read(j, "seeds", l.seeds);
  read(j, "probe_size", l.probe_size);
  read(j, "r_init", l.r_init);
  read(j, "r_lo", l.r_lo);
  read(j, "r_hi", l.r_hi);
  read(j, "max_bisect_iters", l.max_bisect_iters);
  read(j, "min_kept_fraction", l.min_kept_fraction);
}

void apply_benchmark(BenchmarkSpec& b, const json& j) {
  check_keys(j, {"solvers", "nfe", "oracle_n_fine", "sliced_projections"}, "benchmark");
  read(j, "solvers", b.solvers);
  read(j, "nfe", b.nfe);
  read(j, "oracle_n_fine", b.oracle_n_fine);
  read(j, "sliced_projections", b.sliced_projections);
}

void apply_output(OutputSpec& o, const json& j) {
  check_keys(j, {"dir", "schedule_file", "grid_file", "trajectories"}, "output");
  read(j, "dir", o.dir);
  read(j, "schedule_file", o.schedule_file);
  read(j, "grid_file", o.grid_file);
  read(j, "trajectories", o.trajectories);
}

}  // namespace

void apply_json(RunConfig& config, const json& doc) {
  check_keys(doc, {"model", "noise_schedule", "solver", "learn", "benchmark", "output", "n_samples", "seed"},
             "config");
  try {
    if (doc.contains("model")) apply_model(config.model, doc.at("model"));
    if (doc.contains("noise_schedule")) apply_noise_schedule(config.noise_schedule, doc.at("noise_schedule"));
    if (doc.contains("solver")) apply_solver(config.solver, doc.at("solver"));
    if (doc.contains("learn")) apply_learn(config.learn, doc.at("learn"));
    if (doc.contains("benchmark")) apply_benchmark(config.benchmark, doc.at("benchmark"));
    if (doc.contains("output")) apply_output(config.output, doc.at("output"));
    read(doc, "n_samples", config.n_samples);
    read(doc, "seed", config.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config value: ") + e.what());
  }
}

RunConfig load_config_file(const std::string& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!doc.contains("seed")) {
    throw ConfigError("config file " + path + " must set 'seed'");
  }
  apply_json(base, doc);
  return base;
}

json to_json(const RunConfig& c) {
  json model = {{"kind", c.model.kind == ModelKind::Gaussian ? "gaussian" : "gmm"}, {"dim", c.model.dim}};
  if (c.model.kind == ModelKind::Gaussian) {
    model["mean"] = list_json(c.model.mean);
    model["var"] = list_json(c.model.var);
  } else if (c.model.components.empty()) {
    model["offset"] = list_json(c.model.offset);
    model["component_var"] = list_json(c.model.component_var);
  } else {
    json comps = json::array();
    for (const auto& comp : c.model.components) {
      comps.push_back({{"mean", std::vector<double>(comp.mean.data(), comp.mean.data() + comp.mean.size())},
                       {"var", std::vector<double>(comp.var.data(), comp.var.data() + comp.var.size())}});
    }
    model["components"] = comps;
    model["weights"] = c.model.weights;
  }

  json noise = {{"kind", std::string(to_string(c.noise_schedule.kind))},
                {"T", c.noise_schedule.horizon},
                {"N", c.noise_schedule.n_discrete}};
  if (c.noise_schedule.kind == ScheduleKind::Linear) {
    noise["beta_start"] = c.noise_schedule.linear.beta_start;
    noise["beta_end"] = c.noise_schedule.linear.beta_end;
  } else {
    noise["s"] = c.noise_schedule.cosine.offset;
  }

  json solver = {{"kind", std::string(to_string(c.solver.kind))},
                 {"K", c.solver.K},
                 {"r", c.solver.r ? json(*c.solver.r) : json(nullptr)},
                 {"estimator", std::string(to_string(c.solver.estimator))},
                 {"norm", std::string(to_string(c.solver.norm))},
                 {"first_step_cap", c.solver.first_step_cap},
                 {"h_min", c.solver.h_min},
                 {"schedule_file", c.solver.schedule_file},
                 {"spacing", c.solver.spacing},
                 {"ancestral_variance", std::string(to_string(c.solver.ancestral_variance))},
                 {"n_fine", c.solver.n_fine}};

  json learn = {{"seeds", c.learn.seeds},       {"probe_size", c.learn.probe_size},
                {"r_init", c.learn.r_init},     {"r_lo", c.learn.r_lo},
                {"r_hi", c.learn.r_hi},         {"max_bisect_iters", c.learn.max_bisect_iters},
                {"min_kept_fraction", c.learn.min_kept_fraction}};
  json bench = {{"solvers", c.benchmark.solvers},
                {"nfe", c.benchmark.nfe},
                {"oracle_n_fine", c.benchmark.oracle_n_fine},
                {"sliced_projections", c.benchmark.sliced_projections}};
  json output = {{"dir", c.output.dir},
                 {"schedule_file", c.output.schedule_file},
                 {"grid_file", c.output.grid_file},
                 {"trajectories", c.output.trajectories}};
  return {{"model", model},   {"noise_schedule", noise}, {"solver", solver},       {"learn", learn},
          {"benchmark", bench}, {"output", output},      {"n_samples", c.n_samples}, {"seed", c.seed}};
}

std::unique_ptr<NoisePredictor> build_model(const ModelSpec& spec) {
  if (spec.dim < 1) throw ConfigError("model dim must be >= 1");
  if (spec.kind == ModelKind::Gaussian) {
    return std::make_unique<GaussianModel>(broadcast(spec.mean, spec.dim, "model.mean"),
                                           broadcast(spec.var, spec.dim, "model.var"));
  }
  if (!spec.components.empty()) {
    std::vector<double> weights = spec.weights;
    if (weights.empty()) weights.assign(spec.components.size(), 1.0 / static_cast<double>(spec.components.size()));
    return std::make_unique<GmmModel>(std::move(weights), spec.components);
  }
  const StateVec offset = broadcast(spec.offset, spec.dim, "model.offset");
  const StateVec var = broadcast(spec.component_var, spec.dim, "model.component_var");
  return std::make_unique<GmmModel>(std::vector<double>{0.5, 0.5},
                                    std::vector<GaussianComponent>{{offset, var}, {-offset, var}});
}

DrbeOptions build_drbe_options(const SolverSpec& spec) {
  DrbeOptions options;
  if (spec.r) options.threshold_r = *spec.r;
  options.estimator.method = spec.estimator;
  options.norm = spec.norm;
  options.first_step_cap = spec.first_step_cap;
  options.h_min = spec.h_min;
  return options;
}

ScheduleLearnConfig build_learn_config(const RunConfig& config, int target_K) {
  ScheduleLearnConfig cfg;
  cfg.target_K = target_K;
  cfg.n_seeds = config.learn.seeds;
  cfg.probe_size = config.learn.probe_size;
  cfg.r_init = config.learn.r_init;
  cfg.calibration = {config.learn.r_lo, config.learn.r_hi, config.learn.max_bisect_iters};
  cfg.drbe = build_drbe_options(config.solver);
  cfg.seed = config.seed;
  cfg.min_kept_fraction = config.learn.min_kept_fraction;
  return cfg;
}

TargetMoments target_moments(const NoisePredictor& model) {
  if (const auto* g = dynamic_cast<const GaussianModel*>(&model)) {
    return {g->mean(), g->var()};
  }
  if (const auto* m = dynamic_cast<const GmmModel*>(&model)) {
    return {m->data_mean(), m->data_var()};
  }
  throw ConfigError("target moments are only known for analytic models");
}

}  // namespace bea
