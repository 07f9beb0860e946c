#pragma once

// The two detection channels of the experiment: per-qubit camera readout
// (bitstrings) and global PMT photon counting (Poissonian counts resolving
// only the number of bright ions), plus parity observables. Sampling is
// deterministic given (seed, shot index); every shot draws from its own
// derived substream.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "ghzsim/register_model.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct ParityDataset {
  int n = 0;
  int shots_per_setting = 0;
  struct Entry {
    double phi = 0.0;
    std::vector<Bitstring> shots;
  };
  std::vector<Entry> entries;
};

struct PmtShot {
  int counts = 0;
};

/// Expected parity (-1)^{number of bright qubits} after the collective pi/2
/// analysis rotation with phase phi. For complementary branches this is
/// 2 Re[c (-i)^{delta_k} e^{i delta_k phi}]; the unstructured leak bucket
/// contributes zero. GHZ branches give the familiar n-fold oscillation.
double parity_expectation(const BranchPairState& state, double phi);

/// Closed-form outcome distribution after the analysis rotation:
/// p(s) = 2^{-n} [ (p_a+p_b) + 2 Re(c i^n (-1)^{n-k(s)} e^{i n phi}) ].
/// Requires the GHZ branch pair (0...0 / 1...1) and p_leak == 0.
std::vector<double> camera_outcome_distribution(const BranchPairState& state, double phi);

/// Per-qubit camera shots of the rotated state. Same preconditions as
/// camera_outcome_distribution.
std::vector<Bitstring> sample_camera_shots(const BranchPairState& state, double phi,
                                           int n_shots, std::uint64_t seed);

/// Unrotated fluorescence detection: branch_a w.p. p_a, branch_b w.p. p_b,
/// and a uniformly random non-branch string w.p. p_leak.
std::vector<Bitstring> measure_populations_direct(const BranchPairState& state, int n_shots,
                                                  std::uint64_t seed);

/// Parity outcomes (+-1) sampled from the exact parity expectation. Works
/// for any branch pair, including leaky states where per-qubit camera
/// statistics are not representable.
std::vector<std::int8_t> sample_parity_outcomes(const BranchPairState& state, double phi,
                                                int n_shots, std::uint64_t seed);

/// PMT counts: per shot draw the bright-ion number k from the given
/// distribution over 0..n, then counts ~ Poisson(k*lambda_ion + lambda_bg).
std::vector<PmtShot> sample_pmt_counts(const std::vector<double>& bright_probabilities,
                                       double lambda_ion, double lambda_bg, int n_shots,
                                       std::uint64_t seed);

/// Distribution of the bright-ion number for the unrotated state. The leak
/// bucket spreads uniformly over the non-branch strings.
std::vector<double> bright_count_distribution(const BranchPairState& state);

/// Distribution of the bright-ion number after the analysis rotation. The
/// leak bucket is treated as the maximally mixed background (binomial k),
/// which is exact for uniform leak and rotation-invariant.
std::vector<double> rotated_bright_count_distribution(const BranchPairState& state, double phi);

/// Mean of (-1)^{k(s)} with standard error sqrt((1 - m^2)/n_shots).
Estimate parity_from_shots(std::span<const Bitstring> shots);
Estimate parity_from_outcomes(std::span<const std::int8_t> outcomes);

/// CSV emission; one row per shot. Headers are part of the file contract.
void write_camera_csv(std::ostream& out, const ParityDataset& dataset);
void write_pmt_csv(std::ostream& out,
                   const std::vector<std::vector<PmtShot>>& shots_per_setting);

}  // namespace ghzsim
