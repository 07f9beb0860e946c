#pragma once

// Config-driven experiment pipelines: state creation -> wait -> measure ->
// analyze, for the four scenarios. Every run is a pure function of its
// configuration (seed included); file emission is atomic per scenario.

#include <array>
#include <filesystem>
#include <optional>
#include <vector>

#include "json.hpp"

#include "ghzsim/config.hpp"
#include "ghzsim/estimation.hpp"
#include "ghzsim/register_model.hpp"
#include "ghzsim/report.hpp"

namespace ghzsim {

struct MsPreparationCheck {
  double family_fidelity = 0.0;
  double population_a = 0.0;
  double population_b = 0.0;
};

struct CharacterizeOutcome {
  StateReport report;
  std::optional<MsPreparationCheck> ms_check;
  std::optional<ParityDataset> camera_raw;
  std::vector<std::vector<PmtShot>> pmt_raw;  ///< one block per phi setting
};

struct EpsPoint {
  double t = 0.0;
  std::optional<Estimate> eps;  ///< absent when the coherence ratio was non-positive
};

struct DecayOutcome {
  DecayCurve curve;
  std::vector<EpsPoint> eps_series;
  std::optional<DecayFit> fit;  ///< absent when nothing decays over the grid
  std::optional<ParityDataset> reference_raw;  ///< t = 0 camera dataset when sampled
};

struct ScalingOutcome {
  ScalingFit fit;
  std::optional<DecayFit> reference_fit;  ///< N=1 full-OU fit (sampled mode)
};

struct MeasurementComparison {
  double measured_ms = 324.0;  ///< measured coherence time of the insensitive register
  double measured_err_ms = 42.0;
  double simulated_ms = 0.0;
  double simulated_err_ms = 0.0;
  bool within_one_sigma = false;
};

struct DfsOutcome {
  DecayCurve dfs_curve;
  DecayCurve ghz_curve;
  std::optional<DecayFit> dfs_fit;
  std::optional<DecayFit> ghz_fit;
  std::optional<double> timescale_ratio;  ///< dfs / ghz
  MeasurementComparison measurement;
};

CharacterizeOutcome run_ghz_characterize(const ExperimentConfig& config);
DecayOutcome run_ghz_decay(const ExperimentConfig& config);
ScalingOutcome run_scaling_study(const ExperimentConfig& config);
DfsOutcome run_dfs_contrast(const ExperimentConfig& config);

/// Runs the configured scenario and writes report.json plus the scenario's
/// CSV files into out_dir (created if missing). Returns the report content.
nlohmann::ordered_json run_scenario_to_files(const ExperimentConfig& config,
                                             const std::filesystem::path& out_dir);

/// `count` analysis phases spanning exactly one parity period [0, 2 pi / n].
std::vector<double> default_phi_grid(int n, int count);

/// t = 0 plus `count` log-spaced times covering [0.1, 3] of the state's 1/e
/// coherence time under the configured channels. Empty when nothing decays.
std::vector<double> auto_wait_times(const BranchPairState& state, const ExperimentConfig& config,
                                    int count);

/// The initial register of a single-register scenario.
BranchPairState initial_state(const ExperimentConfig& config);

/// State after waiting t under the configured dephasing/damping channels.
BranchPairState evolve_state(const BranchPairState& state, const ExperimentConfig& config,
                             double t);

}  // namespace ghzsim
