#pragma once

// Flat, documented experiment configuration. All physical quantities carry
// the unit in the key name (the modeled timescales span ms..s against rates
// in rad/s, so unit mistakes are the main configuration hazard). The seed is mandatory:
// scenario runs never draw entropy from the environment.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ghzsim/noise_kernels.hpp"

namespace ghzsim {

enum class Scenario { ghz_characterize, ghz_decay, scaling_study, dfs_contrast };
enum class Detection { camera, pmt };
enum class InitialState { ghz, dfs };

struct ExperimentConfig {
  Scenario scenario = Scenario::ghz_characterize;
  int n = 0;                        ///< register size (single-register scenarios)
  std::vector<int> n_list;          ///< register sizes (scaling_study; must contain 1)
  NoiseParams noise;                ///< sigma2_rad2_per_s2, gamma_per_s
  std::optional<double> t1_s;       ///< metastable-state lifetime; absent = no decay
  std::vector<double> wait_times_s; ///< explicit grid; empty = auto (log-spaced
                                    ///< over 0.1..3 coherence times, t=0 prepended)
  int n_wait_times = 8;             ///< auto-grid size
  int shots_per_setting = 100;
  int phi_settings = 0;             ///< 0 = default 3n+1 over one parity period
  Detection detection = Detection::camera;
  double lambda_ion_counts_per_shot = 20.0;
  double lambda_bg_counts_per_shot = 1.0;
  std::uint64_t seed = 0;
  bool analytic = false;            ///< closed forms only, no sampling
  InitialState initial_state = InitialState::ghz;
  std::optional<double> initial_populations;  ///< degraded preparation P
  std::optional<double> initial_coherence;    ///< degraded preparation C
  bool prepare_via_ms = false;      ///< cross-check preparation on the statevector
  std::optional<std::string> decay_fit_model; ///< exponential | gaussian | full_ou
};

/// Parses and validates; throws ConfigError naming the offending field.
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::filesystem::path& path);
void validate(const ExperimentConfig& config);

/// Echo of the effective configuration (stable key order).
nlohmann::ordered_json config_to_json(const ExperimentConfig& config);

std::string to_string(Scenario scenario);

}  // namespace ghzsim
