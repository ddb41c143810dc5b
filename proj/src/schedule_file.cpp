// Copyright 2026 The bea-sampler Authors
// SPDX-License-Identifier: Apache-2.0

#include "bea/schedule_file.hpp"

#include "bea/types.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace bea {

namespace {

std::string full_precision(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string number_list(const std::vector<double>& values) {
  std::string out = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    out += i == 0 ? "\n    " : ",\n    ";
    out += full_precision(values[i]);
  }
  out += "\n  ]";
  return out;
}

}  // namespace

ScheduleFile ScheduleFile::from_learned(const LearnedSchedule& learned, const NoiseSchedule& noise_schedule) {
  ScheduleFile file;
  file.noise_schedule = noise_schedule.spec();
  file.provenance = std::string(to_string(learned.schedule.provenance()));
  file.target_K = learned.target_K;
  file.threshold_r = learned.threshold_r;
  file.n_seeds = learned.n_seeds;
  file.n_kept = learned.n_kept;
  file.times = learned.schedule.times();
  file.gammas = learned.schedule.gammas();
  return file;
}

InferenceSchedule ScheduleFile::inference_schedule() const {
  return InferenceSchedule::from_times(times, NoiseSchedule(noise_schedule), provenance_from_string(provenance));
}

std::string to_text(const ScheduleFile& file) {
  const auto& ns = file.noise_schedule;
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": " << ScheduleFile::kFormatVersion << ",\n";
  out << "  \"noise_schedule\": {\n";
  out << "    \"kind\": \"" << to_string(ns.kind) << "\",\n";
  out << "    \"T\": " << full_precision(ns.horizon) << ",\n";
  out << "    \"N\": " << ns.n_discrete << ",\n";
  if (ns.kind == ScheduleKind::Linear) {
    out << "    \"params\": {\"beta_start\": " << full_precision(ns.linear.beta_start)
        << ", \"beta_end\": " << full_precision(ns.linear.beta_end) << "}\n";
  } else {
    out << "    \"params\": {\"s\": " << full_precision(ns.cosine.offset) << "}\n";
  }
  out << "  },\n";
  out << "  \"provenance\": \"" << file.provenance << "\",\n";
  out << "  \"target_K\": " << file.target_K << ",\n";
  out << "  \"threshold_r\": " << full_precision(file.threshold_r) << ",\n";
  out << "  \"n_seeds\": " << file.n_seeds << ",\n";
  out << "  \"n_kept\": " << file.n_kept << ",\n";
  out << "  \"times\": " << number_list(file.times) << ",\n";
  out << "  \"gammas\": " << number_list(file.gammas) << "\n";
  out << "}\n";
  return out.str();
}

ScheduleFile parse_schedule_file(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("schedule file is not valid JSON: ") + e.what());
  }
  ScheduleFile file;
  try {
    const int version = doc.at("format_version").get<int>();
    if (version != ScheduleFile::kFormatVersion) {
      throw ConfigError("unsupported schedule format_version " + std::to_string(version));
    }
    const auto& ns = doc.at("noise_schedule");
    file.noise_schedule.kind = schedule_kind_from_string(ns.at("kind").get<std::string>());
    file.noise_schedule.horizon = ns.at("T").get<double>();
    file.noise_schedule.n_discrete = ns.at("N").get<int>();
    const auto& params = ns.at("params");
    if (file.noise_schedule.kind == ScheduleKind::Linear) {
      file.noise_schedule.linear.beta_start = params.at("beta_start").get<double>();
      file.noise_schedule.linear.beta_end = params.at("beta_end").get<double>();
    } else {
      file.noise_schedule.cosine.offset = params.at("s").get<double>();
    }
    file.provenance = doc.at("provenance").get<std::string>();
    file.target_K = doc.at("target_K").get<int>();
    file.threshold_r = doc.at("threshold_r").get<double>();
    file.n_seeds = doc.at("n_seeds").get<int>();
    file.n_kept = doc.at("n_kept").get<int>();
    file.times = doc.at("times").get<std::vector<double>>();
    file.gammas = doc.at("gammas").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed schedule file: ") + e.what());
  }

  if (file.target_K < 1 || file.times.size() != static_cast<std::size_t>(file.target_K) + 1 ||
      file.gammas.size() != file.times.size()) {
    throw ConfigError("schedule file must hold target_K + 1 times and gammas");
  }
  for (std::size_t k = 1; k < file.times.size(); ++k) {
    if (!(file.times[k] < file.times[k - 1])) {
      throw ConfigError("schedule file monotonicity violation: times must strictly decrease (knot " +
                        std::to_string(k + 1) + ")");
    }
    if (!(file.gammas[k] > file.gammas[k - 1])) {
      throw ConfigError("schedule file monotonicity violation: gammas must strictly increase (knot " +
                        std::to_string(k + 1) + ")");
    }
  }
  provenance_from_string(file.provenance);
  const NoiseSchedule noise(file.noise_schedule);
  for (std::size_t k = 0; k < file.times.size(); ++k) {
    const double expected = noise.gamma(file.times[k]);
    if (std::abs(expected - file.gammas[k]) > 1e-12 * expected) {
      throw ConfigError("schedule file gamma at knot " + std::to_string(k + 1) +
                        " disagrees with its noise schedule");
    }
  }
  return file;
}

void write_schedule_file(const std::string& path, const ScheduleFile& file) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << to_text(file);
  if (!out) throw std::runtime_error("failed writing " + path);
}

ScheduleFile read_schedule_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_schedule_file(buf.str());
}

}  // namespace bea
