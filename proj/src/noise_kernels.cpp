#include "ghzsim/noise_kernels.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "ghzsim/rng.hpp"

namespace ghzsim {

namespace {

// e^{-x} + x - 1 evaluated without cancellation at small x.
double decay_hump(double x) { return std::expm1(-x) + x; }

void check_qubits(int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("qubit count must be >= 1");
}

void check_time(double t) {
  if (!(t >= 0.0)) throw std::invalid_argument("time must be >= 0");
}

}  // namespace

void validate(const NoiseParams& params) {
  if (!(params.sigma2 >= 0.0)) throw std::invalid_argument("NoiseParams.sigma2 must be >= 0");
  if (!(params.gamma > 0.0)) throw std::invalid_argument("NoiseParams.gamma must be > 0");
}

Trajectory ou_sample_trajectory(const NoiseParams& params, double t_max, double dt,
                                std::uint64_t seed) {
  validate(params);
  if (!(dt > 0.0) || !(t_max >= dt)) {
    throw std::invalid_argument("ou_sample_trajectory requires t_max >= dt > 0");
  }
  const auto n_steps = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
  Trajectory traj;
  traj.dt = dt;
  traj.seed = seed;
  traj.samples.resize(n_steps + 1);

  const double sigma = std::sqrt(params.sigma2);
  const double decay = std::exp(-params.gamma * dt);
  const double step_sigma = sigma * std::sqrt(-std::expm1(-2.0 * params.gamma * dt));

  rng::Xoshiro256 gen(seed);
  double x = sigma * gen.normal();
  traj.samples[0] = x;
  for (std::size_t i = 1; i <= n_steps; ++i) {
    x = x * decay + step_sigma * gen.normal();
    traj.samples[i] = x;
  }
  return traj;
}

double trajectory_phase(const Trajectory& traj) {
  const auto& x = traj.samples;
  if (x.size() < 2) return 0.0;
  rng::KahanSum acc;
  acc.add(0.5 * x.front());
  for (std::size_t i = 1; i + 1 < x.size(); ++i) acc.add(x[i]);
  acc.add(0.5 * x.back());
  return acc.value() * traj.dt;
}

double integrated_phase_variance(const NoiseParams& params, double t) {
  validate(params);
  check_time(t);
  const double g = params.gamma;
  return 2.0 * params.sigma2 * decay_hump(g * t) / (g * g);
}

double error_probability(int n_qubits, const NoiseParams& params, double t) {
  check_qubits(n_qubits);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  return nn * integrated_phase_variance(params, t) / 4.0;
}

double error_probability_white(int n_qubits, const NoiseParams& params, double t) {
  check_qubits(n_qubits);
  validate(params);
  check_time(t);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  return nn * (params.sigma2 / params.gamma) * t / 2.0;
}

double error_probability_frozen(int n_qubits, const NoiseParams& params, double t) {
  check_qubits(n_qubits);
  validate(params);
  check_time(t);
  const double nn = static_cast<double>(n_qubits) * n_qubits;
  return nn * params.sigma2 * t * t / 4.0;
}

double error_probability_kind(int n_qubits, const NoiseParams& params, double t,
                              NoiseKind kind) {
  switch (kind) {
    case NoiseKind::white:
      return error_probability_white(n_qubits, params, t);
    case NoiseKind::frozen:
      return error_probability_frozen(n_qubits, params, t);
    case NoiseKind::ornstein_uhlenbeck:
    default:
      return error_probability(n_qubits, params, t);
  }
}

double fidelity_analytic(int n_qubits, const NoiseParams& params, double t) {
  return 0.5 * (1.0 + std::exp(-2.0 * error_probability(n_qubits, params, t)));
}

double fidelity_markov_limit(int n_qubits, const NoiseParams& params, double t) {
  check_time(t);
  return 0.5 * (1.0 + std::exp(-2.0 * error_probability_white(n_qubits, params, t)));
}

double fidelity_static_limit(int n_qubits, const NoiseParams& params, double t) {
  check_time(t);
  return 0.5 * (1.0 + std::exp(-2.0 * error_probability_frozen(n_qubits, params, t)));
}

double t2_markovian(int n_qubits, const NoiseParams& params) {
  check_qubits(n_qubits);
  validate(params);
  if (params.sigma2 == 0.0) return std::numeric_limits<double>::infinity();
  return params.gamma / (static_cast<double>(n_qubits) * n_qubits * params.sigma2);
}

double tau_static(int n_qubits, const NoiseParams& params) {
  check_qubits(n_qubits);
  validate(params);
  if (params.sigma2 == 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / (static_cast<double>(n_qubits) * std::sqrt(params.sigma2));
}

FidelityCurve analytic_fidelity_curve(int n_qubits, const NoiseParams& params,
                                      const std::vector<double>& times) {
  FidelityCurve curve;
  curve.points.reserve(times.size());
  for (double t : times) curve.points.emplace_back(t, fidelity_analytic(n_qubits, params, t));
  return curve;
}

McFidelity mc_fidelity(int n_qubits, const NoiseParams& params, double t,
                       std::int64_t n_trajectories, double dt, std::uint64_t seed,
                       std::int64_t trajectory_offset) {
  check_qubits(n_qubits);
  validate(params);
  check_time(t);
  if (n_trajectories < 1) throw std::invalid_argument("mc_fidelity requires n_trajectories >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("mc_fidelity requires dt > 0");

  McFidelity out;
  out.coarse_dt = dt > 0.1 / params.gamma;

  if (t == 0.0 || params.sigma2 == 0.0) {
    out.fidelity = Estimate{1.0, 0.0, n_trajectories};
    return out;
  }

  const auto n_steps = static_cast<std::size_t>(std::ceil(t / dt - 1e-12));
  const double step = t / static_cast<double>(n_steps);
  const double sigma = std::sqrt(params.sigma2);
  const double decay = std::exp(-params.gamma * step);
  const double step_sigma = sigma * std::sqrt(-std::expm1(-2.0 * params.gamma * step));
  const double n_factor = static_cast<double>(n_qubits);

  rng::KahanSum sum;
  rng::KahanSum sum_sq;
  for (std::int64_t traj = 0; traj < n_trajectories; ++traj) {
    rng::Xoshiro256 gen(
        rng::derive_stream(seed, static_cast<std::uint64_t>(trajectory_offset + traj)));
    double x = sigma * gen.normal();
    rng::KahanSum phase;
    phase.add(0.5 * x);
    for (std::size_t i = 1; i < n_steps; ++i) {
      x = x * decay + step_sigma * gen.normal();
      phase.add(x);
    }
    x = x * decay + step_sigma * gen.normal();
    phase.add(0.5 * x);
    const double f = 0.5 * (1.0 + std::cos(n_factor * phase.value() * step));
    sum.add(f);
    sum_sq.add(f * f);
  }

  const double count = static_cast<double>(n_trajectories);
  const double mean = sum.value() / count;
  double sem = 0.0;
  if (n_trajectories > 1) {
    const double var = (sum_sq.value() - count * mean * mean) / (count - 1.0);
    sem = std::sqrt(std::max(var, 0.0) / count);
  }
  out.fidelity = Estimate{mean, sem, n_trajectories};
  return out;
}

}  // namespace ghzsim
