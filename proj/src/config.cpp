#include "ghzsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "ghzsim/types.hpp"

namespace ghzsim {

namespace {

const std::set<std::string> kKnownKeys = {
    "scenario",        "n",
    "n_list",          "sigma2_rad2_per_s2",
    "gamma_per_s",     "t1_s",
    "wait_times_s",    "n_wait_times",
    "shots_per_setting", "phi_settings",
    "detection",       "lambda_ion_counts_per_shot",
    "lambda_bg_counts_per_shot", "seed",
    "analytic",        "initial_state",
    "initial_populations", "initial_coherence",
    "prepare_via_ms",  "decay_fit_model",
};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config field '" + field + "': " + what);
}

Scenario parse_scenario(const std::string& s) {
  if (s == "ghz_characterize") return Scenario::ghz_characterize;
  if (s == "ghz_decay") return Scenario::ghz_decay;
  if (s == "scaling_study") return Scenario::scaling_study;
  if (s == "dfs_contrast") return Scenario::dfs_contrast;
  fail("scenario", "unknown scenario '" + s + "'");
}

}  // namespace

std::string to_string(Scenario scenario) {
  switch (scenario) {
    case Scenario::ghz_characterize: return "ghz_characterize";
    case Scenario::ghz_decay: return "ghz_decay";
    case Scenario::scaling_study: return "scaling_study";
    case Scenario::dfs_contrast: return "dfs_contrast";
  }
  return "unknown";
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!kKnownKeys.count(key)) fail(key, "unknown key");
  }

  ExperimentConfig config;
  try {
    if (!j.contains("scenario")) fail("scenario", "required");
    config.scenario = parse_scenario(j.at("scenario").get<std::string>());

    if (j.contains("n")) config.n = j.at("n").get<int>();
    if (j.contains("n_list")) config.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("sigma2_rad2_per_s2")) {
      config.noise.sigma2 = j.at("sigma2_rad2_per_s2").get<double>();
    }
    if (j.contains("gamma_per_s")) config.noise.gamma = j.at("gamma_per_s").get<double>();
    if (j.contains("t1_s")) config.t1_s = j.at("t1_s").get<double>();
    if (j.contains("wait_times_s")) {
      config.wait_times_s = j.at("wait_times_s").get<std::vector<double>>();
    }
    if (j.contains("n_wait_times")) config.n_wait_times = j.at("n_wait_times").get<int>();
    if (j.contains("shots_per_setting")) {
      config.shots_per_setting = j.at("shots_per_setting").get<int>();
    }
    if (j.contains("phi_settings")) config.phi_settings = j.at("phi_settings").get<int>();
    if (j.contains("detection")) {
      const auto d = j.at("detection").get<std::string>();
      if (d == "camera") {
        config.detection = Detection::camera;
      } else if (d == "pmt") {
        config.detection = Detection::pmt;
      } else {
        fail("detection", "must be 'camera' or 'pmt'");
      }
    }
    if (j.contains("lambda_ion_counts_per_shot")) {
      config.lambda_ion_counts_per_shot = j.at("lambda_ion_counts_per_shot").get<double>();
    }
    if (j.contains("lambda_bg_counts_per_shot")) {
      config.lambda_bg_counts_per_shot = j.at("lambda_bg_counts_per_shot").get<double>();
    }
    if (!j.contains("seed")) fail("seed", "required (runs take no entropy from the environment)");
    config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("analytic")) config.analytic = j.at("analytic").get<bool>();
    if (j.contains("initial_state")) {
      const auto s = j.at("initial_state").get<std::string>();
      if (s == "ghz") {
        config.initial_state = InitialState::ghz;
      } else if (s == "dfs") {
        config.initial_state = InitialState::dfs;
      } else {
        fail("initial_state", "must be 'ghz' or 'dfs'");
      }
    }
    if (j.contains("initial_populations")) {
      config.initial_populations = j.at("initial_populations").get<double>();
    }
    if (j.contains("initial_coherence")) {
      config.initial_coherence = j.at("initial_coherence").get<double>();
    }
    if (j.contains("prepare_via_ms")) config.prepare_via_ms = j.at("prepare_via_ms").get<bool>();
    if (j.contains("decay_fit_model")) {
      config.decay_fit_model = j.at("decay_fit_model").get<std::string>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }

  validate(config);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return config_from_json(j);
}

void validate(const ExperimentConfig& config) {
  const bool needs_single_n = config.scenario != Scenario::scaling_study;
  if (needs_single_n) {
    if (config.n < 1 || config.n > 32) fail("n", "must be in [1, 32]");
  } else {
    if (config.n_list.empty()) fail("n_list", "required for scaling_study");
    for (int n : config.n_list) {
      if (n < 1 || n > 32) fail("n_list", "entries must be in [1, 32]");
    }
    if (std::find(config.n_list.begin(), config.n_list.end(), 1) == config.n_list.end()) {
      fail("n_list", "must contain the single-qubit reference N=1");
    }
  }
  if (config.scenario == Scenario::dfs_contrast ||
      (config.scenario == Scenario::ghz_decay && config.initial_state == InitialState::dfs)) {
    if (config.n % 2 != 0) fail("n", "must be even for the dephasing-free pair");
  }
  if (!(config.noise.sigma2 >= 0.0)) fail("sigma2_rad2_per_s2", "must be >= 0");
  if (!(config.noise.gamma > 0.0)) fail("gamma_per_s", "must be > 0");
  if (config.t1_s && !(*config.t1_s > 0.0)) fail("t1_s", "must be > 0");
  for (double t : config.wait_times_s) {
    if (!(t >= 0.0)) fail("wait_times_s", "entries must be >= 0");
  }
  if (!std::is_sorted(config.wait_times_s.begin(), config.wait_times_s.end())) {
    fail("wait_times_s", "must be sorted ascending");
  }
  if (config.n_wait_times < 1) fail("n_wait_times", "must be >= 1");
  if (config.shots_per_setting < 1) fail("shots_per_setting", "must be >= 1");
  if (config.phi_settings != 0 && config.phi_settings < 3) {
    fail("phi_settings", "must be >= 3 (or 0 for the default 3n+1)");
  }
  if (!(config.lambda_ion_counts_per_shot > 0.0)) {
    fail("lambda_ion_counts_per_shot", "must be > 0");
  }
  if (config.lambda_bg_counts_per_shot < 0.0) {
    fail("lambda_bg_counts_per_shot", "must be >= 0");
  }
  if (config.initial_populations &&
      !(*config.initial_populations >= 0.0 && *config.initial_populations <= 1.0)) {
    fail("initial_populations", "must lie in [0, 1]");
  }
  if (config.initial_coherence &&
      !(*config.initial_coherence >= 0.0 && *config.initial_coherence <= 1.0)) {
    fail("initial_coherence", "must lie in [0, 1]");
  }
  if (config.initial_coherence) {
    const double p = config.initial_populations.value_or(1.0);
    if (*config.initial_coherence > p + 1e-12) {
      fail("initial_coherence", "cannot exceed initial_populations");
    }
  }
  if (config.decay_fit_model && *config.decay_fit_model != "exponential" &&
      *config.decay_fit_model != "gaussian" && *config.decay_fit_model != "full_ou") {
    fail("decay_fit_model", "must be exponential, gaussian, or full_ou");
  }
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& config) {
  nlohmann::ordered_json j;
  j["scenario"] = to_string(config.scenario);
  if (config.scenario == Scenario::scaling_study) {
    j["n_list"] = config.n_list;
  } else {
    j["n"] = config.n;
  }
  j["sigma2_rad2_per_s2"] = config.noise.sigma2;
  j["gamma_per_s"] = config.noise.gamma;
  if (config.t1_s) j["t1_s"] = *config.t1_s;
  if (!config.wait_times_s.empty()) j["wait_times_s"] = config.wait_times_s;
  j["n_wait_times"] = config.n_wait_times;
  j["shots_per_setting"] = config.shots_per_setting;
  j["phi_settings"] = config.phi_settings;
  j["detection"] = config.detection == Detection::camera ? "camera" : "pmt";
  j["lambda_ion_counts_per_shot"] = config.lambda_ion_counts_per_shot;
  j["lambda_bg_counts_per_shot"] = config.lambda_bg_counts_per_shot;
  j["seed"] = config.seed;
  j["analytic"] = config.analytic;
  j["initial_state"] = config.initial_state == InitialState::ghz ? "ghz" : "dfs";
  if (config.initial_populations) j["initial_populations"] = *config.initial_populations;
  if (config.initial_coherence) j["initial_coherence"] = *config.initial_coherence;
  j["prepare_via_ms"] = config.prepare_via_ms;
  if (config.decay_fit_model) j["decay_fit_model"] = *config.decay_fit_model;
  return j;
}

}  // namespace ghzsim
