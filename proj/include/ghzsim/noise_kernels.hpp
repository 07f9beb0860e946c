#pragma once

// Analytic coherence/error formulas for collective Gaussian phase noise with
// exponential autocorrelation, plus a seeded Ornstein-Uhlenbeck trajectory
// generator used as Monte Carlo cross-check. Energies are expressed as
// angular frequencies throughout (hbar == 1).

#include <cstdint>
#include <utility>
#include <vector>

#include "ghzsim/types.hpp"

namespace ghzsim {

/// Stationary Gaussian frequency noise with autocorrelation
/// K(tau) = sigma2 * exp(-gamma * |tau|).
struct NoiseParams {
  double sigma2 = 0.0;  ///< stationary variance of the frequency offset, rad^2/s^2
  double gamma = 1.0;   ///< correlation decay rate, 1/s
};

/// Throws std::invalid_argument unless sigma2 >= 0 and gamma > 0.
void validate(const NoiseParams& params);

/// Degenerate limits of the exponential-correlation kernel. The limits use
/// dedicated closed forms rather than extreme parameter values, so nothing
/// overflows.
enum class NoiseKind {
  ornstein_uhlenbeck,  ///< exact kernel
  white,               ///< gamma -> inf at fixed sigma2/gamma (Markovian)
  frozen,              ///< gamma -> 0 (static shot-to-shot offset)
};

/// One realization of the frequency offset on a uniform time grid.
struct Trajectory {
  double dt = 0.0;
  std::vector<double> samples;  ///< delta(t_i) = frequency offset, rad/s
  std::uint64_t seed = 0;
};

struct FidelityCurve {
  std::vector<std::pair<double, double>> points;  ///< (t, F)
};

/// Exact-discretization OU sampler: x_{i+1} = x_i e^{-g dt} + s(dt) xi_i with
/// s(dt)^2 = sigma2 (1 - e^{-2 g dt}) and x_0 drawn from the stationary law.
/// Samples cover t = 0 .. floor(t_max/dt)*dt. Identical arguments produce a
/// bit-identical trajectory.
Trajectory ou_sample_trajectory(const NoiseParams& params, double t_max, double dt,
                                std::uint64_t seed);

/// Trapezoidal accumulated phase integral of a trajectory, rad.
double trajectory_phase(const Trajectory& traj);

/// Variance of the accumulated phase phi(t) = int_0^t delta(tau) dtau:
/// 2 sigma2 (e^{-gamma t} + gamma t - 1) / gamma^2, rad^2.
double integrated_phase_variance(const NoiseParams& params, double t);

/// Effective error probability of an n-qubit GHZ-class register:
/// n^2 sigma2 (e^{-gamma t} + gamma t - 1) / (2 gamma^2).
double error_probability(int n_qubits, const NoiseParams& params, double t);

/// Closed forms for the degenerate kernels: white noise gives
/// n^2 (sigma2/gamma) t / 2, frozen noise n^2 sigma2 t^2 / 4.
double error_probability_white(int n_qubits, const NoiseParams& params, double t);
double error_probability_frozen(int n_qubits, const NoiseParams& params, double t);
double error_probability_kind(int n_qubits, const NoiseParams& params, double t, NoiseKind kind);

/// F(t) = (1 + exp(-2 eps(n, t))) / 2 for the exact kernel.
double fidelity_analytic(int n_qubits, const NoiseParams& params, double t);

/// Limit forms: (1 + exp(-t/T2)) / 2 and (1 + exp(-(t/tau)^2 / 2)) / 2.
double fidelity_markov_limit(int n_qubits, const NoiseParams& params, double t);
double fidelity_static_limit(int n_qubits, const NoiseParams& params, double t);

/// T2 = gamma / (n^2 sigma2); tau = 1 / (n sqrt(sigma2)).
/// Both return +infinity when sigma2 == 0.
double t2_markovian(int n_qubits, const NoiseParams& params);
double tau_static(int n_qubits, const NoiseParams& params);

/// Analytic fidelity evaluated on a time grid.
FidelityCurve analytic_fidelity_curve(int n_qubits, const NoiseParams& params,
                                      const std::vector<double>& times);

struct McFidelity {
  Estimate fidelity;
  bool coarse_dt = false;  ///< set when dt > 1/(10 gamma): discretization risk
};

/// Monte Carlo fidelity: mean over trajectories of (1 + cos(n phi)) / 2 with
/// phi the trapezoidal phase integral. Trajectory i uses the substream
/// derived from (seed, trajectory_offset + i), so disjoint chunks computed
/// in parallel merge into the full-run estimate by weighted mean, in any
/// order. The actual step is t / ceil(t/dt) <= dt.
McFidelity mc_fidelity(int n_qubits, const NoiseParams& params, double t,
                       std::int64_t n_trajectories, double dt, std::uint64_t seed,
                       std::int64_t trajectory_offset = 0);

}  // namespace ghzsim
