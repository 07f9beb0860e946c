#pragma once

// Analysis chain: parity-oscillation fits, population estimators (camera
// histogram and Bayesian PMT inference), fidelity, entanglement criteria,
// decay-timescale fits, and the scaling-exponent regression.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ghzsim/measurement.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct ParityPoint {
  double phi = 0.0;
  Estimate parity;
};

struct ParityFit {
  Estimate amplitude;            ///< C = |A|, the coherence
  double phase_offset = 0.0;     ///< phi_0 in A cos(n phi + phi_0) + B
  double vertical_offset = 0.0;  ///< B
  double bootstrap_std_error = 0.0;  ///< 0 unless a bootstrap ran
};

struct ParityFitOptions {
  int bootstrap_resamples = 1000;  ///< 0 disables the bootstrap cross-check
  std::uint64_t bootstrap_seed = 1;
};

/// Weighted least squares of A cos(n phi + phi_0) + B with the frequency
/// fixed to n. Needs >= 3 distinct settings spanning at least one parity
/// period 2 pi / n. Points with zero standard error switch the fit to the
/// unweighted exact path (noiseless synthetic data); otherwise weights are
/// iteratively taken from the fitted model's binomial variance.
ParityFit fit_parity_points(std::span<const ParityPoint> points, int n_qubits,
                            int shots_per_setting = 0);

/// Shot-level entry point: parity per setting via parity_from_shots, then
/// fit_parity_points, plus a seeded bootstrap over shots.
ParityFit fit_parity_curve(const ParityDataset& dataset, const ParityFitOptions& options = {});

/// Same for +-1 parity-outcome records (leaky states).
struct ParityOutcomeDataset {
  int n = 0;
  int shots_per_setting = 0;
  struct Entry {
    double phi = 0.0;
    std::vector<std::int8_t> outcomes;
  };
  std::vector<Entry> entries;
};
ParityFit fit_parity_curve(const ParityOutcomeDataset& dataset,
                           const ParityFitOptions& options = {});

/// Fraction of shots equal to 0...0 or 1...1, with binomial standard error.
Estimate estimate_populations_camera(std::span<const Bitstring> shots, int n_qubits);

/// Empirical distribution over all 2^n strings.
std::vector<double> diagonal_histogram(std::span<const Bitstring> shots, int n_qubits);

/// Normalized per-shot likelihoods over the bright-ion number k = 0..n:
/// L(k) proportional to Poisson(counts; k lambda_ion + lambda_bg).
std::vector<double> pmt_class_likelihoods(int counts, double lambda_ion, double lambda_bg,
                                          int n_qubits);

struct GibbsOptions {
  int burn_in = 300;
  int samples = 1700;
};

/// Posterior over the bright-count distribution q (symmetric Dirichlet(1)
/// prior, Poisson likelihood) via seeded Gibbs sampling with the latent
/// per-shot class as augmentation. Reports the posterior mean/sd of q, of
/// the population estimand P = q_0 + q_n, and of the parity sum
/// sum_k (-1)^k q_k.
struct BrightPosterior {
  std::vector<double> q_mean;
  std::vector<double> q_sd;
  Estimate populations;  ///< q_0 + q_n
  Estimate parity;       ///< sum_k (-1)^k q_k
};
BrightPosterior bayes_populations_pmt(std::span<const PmtShot> shots, double lambda_ion,
                                      double lambda_bg, int n_qubits, std::uint64_t seed,
                                      const GibbsOptions& options = {});

/// F = (P + C)/2 with independent-error propagation.
Estimate ghz_fidelity(const Estimate& populations, const Estimate& coherence);

struct CriterionResult {
  std::string name;
  double statistic = 0.0;
  double threshold = 0.0;
  double margin = 0.0;           ///< statistic - threshold
  double sigma_confidence = 0.0; ///< margin / propagated std error (inf if exact)
  bool passed = false;           ///< margin > 0
  bool exact = false;            ///< the statistic carried zero error
};

/// F > 1/2 implies genuine N-particle entanglement.
CriterionResult criterion_fidelity_threshold(const Estimate& fidelity);

/// Multipartite distillability: 2|c| must exceed rho_ss + rho_s's' for every
/// nontrivial complementary pair (s, ~s); threshold = max over pairs.
CriterionResult criterion_distillability(const Estimate& coherence_magnitude,
                                         const std::vector<double>& diagonal_populations,
                                         int n_qubits);

/// Genuine N-particle entanglement: |c| must exceed the sum over nontrivial
/// complementary pairs of sqrt(rho_ss rho_s's').
CriterionResult criterion_genuine_entanglement(const Estimate& coherence_magnitude,
                                               const std::vector<double>& diagonal_populations,
                                               int n_qubits);

/// Bootstrap sigma-confidences for all three criteria from raw shot records
/// (resamples population shots and parity shots jointly).
struct CriterionBootstrap {
  double fidelity_sigma = 0.0;
  double distillability_sigma = 0.0;
  double genuine_sigma = 0.0;
};
CriterionBootstrap bootstrap_criteria(std::span<const Bitstring> population_shots,
                                      const ParityDataset& parity_data, int n_qubits,
                                      int n_resamples, std::uint64_t seed);

/// eps = -ln(C_t / C_0) / 2 with first-order error propagation.
/// Returns nullopt when C_t <= 0 (coherence lost below the noise floor).
std::optional<Estimate> coherence_to_error_probability(const Estimate& c_t,
                                                       const Estimate& c_0);

struct DecayCurve {
  struct Point {
    double t = 0.0;
    Estimate coherence;
  };
  std::vector<Point> points;
};

enum class DecayModel { exponential, gaussian, full_ou };

struct DecayFit {
  DecayModel model = DecayModel::exponential;
  Estimate amplitude;   ///< C(0)
  Estimate timescale;   ///< T2 (exponential, full_ou) or tau (gaussian)
  Estimate gamma;       ///< correlation rate, full_ou only
};

/// Nonlinear weighted least squares of C(t) = C(0) * model(t).
/// exponential: exp(-t/T2); gaussian: exp(-(t/tau)^2/2);
/// full_ou: exp(-(e^{-gamma t} + gamma t - 1)/(T2 gamma)).
DecayFit fit_decay_timescale(const DecayCurve& curve, DecayModel model);

struct ScalingPoint {
  int n = 0;
  Estimate ratio;  ///< eps(n)/eps(1)
};

struct ScalingFit {
  double alpha = 0.0;
  double alpha_err = 0.0;
  std::vector<ScalingPoint> points;
};

/// Weighted linear regression of ln(ratio) on ln(N), slope = alpha. Requires
/// >= 2 distinct N (>= 3 recommended) and strictly positive ratios. Points
/// with zero error are treated as exact constraints.
ScalingFit fit_scaling_exponent(std::span<const ScalingPoint> points);

}  // namespace ghzsim
