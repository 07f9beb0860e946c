#include "ghzsim/estimation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include "ghzsim/rng.hpp"

namespace ghzsim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct LinearFitResult {
  Eigen::Vector3d beta;      // a, b, offset for a cos + b sin + offset
  Eigen::Matrix3d covariance;
  double chi2 = 0.0;
  int n_points = 0;
};

LinearFitResult solve_parity_ls(std::span<const ParityPoint> points, int n_qubits,
                                const std::vector<double>& sigmas) {
  const auto m = static_cast<int>(points.size());
  Eigen::MatrixXd design(m, 3);
  Eigen::VectorXd y(m);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) {
    const double arg = n_qubits * points[static_cast<std::size_t>(i)].phi;
    design(i, 0) = std::cos(arg);
    design(i, 1) = std::sin(arg);
    design(i, 2) = 1.0;
    y(i) = points[static_cast<std::size_t>(i)].parity.value;
    const double s = sigmas[static_cast<std::size_t>(i)];
    w(i) = (s > 0.0) ? 1.0 / (s * s) : 1.0;
  }
  const Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
  const Eigen::Matrix3d normal = xtw * design;
  const Eigen::FullPivLU<Eigen::Matrix3d> lu(normal);
  if (!lu.isInvertible()) {
    throw FitFailure("parity fit: singular design matrix (degenerate phi settings)");
  }
  LinearFitResult result;
  result.beta = lu.solve(xtw * y);
  result.covariance = lu.inverse();
  const Eigen::VectorXd residual = y - design * result.beta;
  result.chi2 = (residual.array().square() * w.array()).sum();
  result.n_points = m;
  return result;
}

void check_parity_preconditions(std::span<const ParityPoint> points, int n_qubits) {
  if (n_qubits < 1) throw std::invalid_argument("parity fit: n_qubits must be >= 1");
  std::set<long long> distinct;
  double lo = kInf;
  double hi = -kInf;
  for (const auto& p : points) {
    distinct.insert(std::llround(p.phi * 1e12));
    lo = std::min(lo, p.phi);
    hi = std::max(hi, p.phi);
  }
  if (distinct.size() < 3) {
    throw std::invalid_argument("parity fit: need at least 3 distinct phi settings");
  }
  if (hi - lo < 2.0 * M_PI / n_qubits - 1e-9) {
    throw std::invalid_argument("parity fit: phi settings must span one parity period");
  }
}

ParityFit finish_parity_fit(const LinearFitResult& ls, double error_scale,
                            std::int64_t n_samples) {
  const double a = ls.beta(0);
  const double b = ls.beta(1);
  const double amplitude = std::hypot(a, b);
  ParityFit fit;
  fit.vertical_offset = ls.beta(2);
  fit.phase_offset = std::atan2(-b, a);
  double var;
  if (amplitude > 1e-12) {
    var = (a * a * ls.covariance(0, 0) + b * b * ls.covariance(1, 1) +
           2.0 * a * b * ls.covariance(0, 1)) /
          (amplitude * amplitude);
  } else {
    var = 0.5 * (ls.covariance(0, 0) + ls.covariance(1, 1));
  }
  fit.amplitude = Estimate{amplitude, std::sqrt(std::max(var, 0.0)) * error_scale, n_samples};
  return fit;
}

}  // namespace

ParityFit fit_parity_points(std::span<const ParityPoint> points, int n_qubits,
                            int shots_per_setting) {
  check_parity_preconditions(points, n_qubits);
  const auto m = points.size();

  bool all_exact = true;
  for (const auto& p : points) all_exact = all_exact && p.parity.std_error == 0.0;

  std::vector<double> sigmas(m, 0.0);
  if (shots_per_setting > 0) {
    // Iterative model-variance weighting: binomial variance evaluated on the
    // fitted curve instead of the raw per-setting estimate, which keeps
    // saturated settings (all shots the same parity) from getting infinite
    // weight.
    std::fill(sigmas.begin(), sigmas.end(), 1.0);
    LinearFitResult ls = solve_parity_ls(points, n_qubits, sigmas);
    for (int pass = 0; pass < 3; ++pass) {
      for (std::size_t i = 0; i < m; ++i) {
        const double arg = n_qubits * points[i].phi;
        const double model =
            ls.beta(0) * std::cos(arg) + ls.beta(1) * std::sin(arg) + ls.beta(2);
        const double clipped = std::clamp(model, -1.0, 1.0);
        const double var = (std::max(1.0 - clipped * clipped, 0.0) + 1.0 / shots_per_setting) /
                           shots_per_setting;
        sigmas[i] = std::sqrt(var);
      }
      ls = solve_parity_ls(points, n_qubits, sigmas);
    }
    // Inflate reported errors when the fit is worse than its nominal noise.
    const int dof = ls.n_points - 3;
    const double scale = dof > 0 ? std::sqrt(std::max(1.0, ls.chi2 / dof)) : 1.0;
    std::int64_t n_samples = static_cast<std::int64_t>(m) * shots_per_setting;
    return finish_parity_fit(ls, scale, n_samples);
  }

  if (all_exact) {
    const LinearFitResult ls = solve_parity_ls(points, n_qubits, sigmas);
    const int dof = ls.n_points - 3;
    const double s2 = dof > 0 ? std::max(ls.chi2, 0.0) / dof : 0.0;
    return finish_parity_fit(ls, std::sqrt(s2), static_cast<std::int64_t>(m));
  }

  for (std::size_t i = 0; i < m; ++i) {
    sigmas[i] = std::max(points[i].parity.std_error, 1e-12);
  }
  const LinearFitResult ls = solve_parity_ls(points, n_qubits, sigmas);
  std::int64_t n_samples = 0;
  for (const auto& p : points) n_samples += p.parity.n_samples;
  return finish_parity_fit(ls, 1.0, n_samples);
}

namespace {

std::vector<ParityPoint> dataset_points(const ParityDataset& dataset) {
  std::vector<ParityPoint> points;
  points.reserve(dataset.entries.size());
  for (const auto& entry : dataset.entries) {
    points.push_back({entry.phi, parity_from_shots(entry.shots)});
  }
  return points;
}

// Bootstrap over shots: per setting only the even-count matters for parity,
// so resampling reduces to a binomial draw at the empirical rate.
double bootstrap_amplitude_sd(const std::vector<double>& phis,
                              const std::vector<double>& p_even, int n_qubits, int shots,
                              int n_resamples, std::uint64_t seed) {
  if (n_resamples <= 1) return 0.0;
  std::vector<ParityPoint> points(phis.size());
  rng::KahanSum sum;
  rng::KahanSum sum_sq;
  for (int r = 0; r < n_resamples; ++r) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < phis.size(); ++i) {
      int even = 0;
      for (int s = 0; s < shots; ++s) even += gen.uniform01() < p_even[i] ? 1 : 0;
      const double mean = 2.0 * even / shots - 1.0;
      points[i] = {phis[i], Estimate{mean, 0.0, shots}};
    }
    const ParityFit fit = fit_parity_points(points, n_qubits, shots);
    sum.add(fit.amplitude.value);
    sum_sq.add(fit.amplitude.value * fit.amplitude.value);
  }
  const double count = n_resamples;
  const double mean = sum.value() / count;
  const double var = (sum_sq.value() - count * mean * mean) / (count - 1.0);
  return std::sqrt(std::max(var, 0.0));
}

}  // namespace

ParityFit fit_parity_curve(const ParityDataset& dataset, const ParityFitOptions& options) {
  const auto points = dataset_points(dataset);
  ParityFit fit = fit_parity_points(points, dataset.n, dataset.shots_per_setting);
  if (options.bootstrap_resamples > 1 && dataset.shots_per_setting > 0) {
    std::vector<double> phis;
    std::vector<double> p_even;
    for (const auto& entry : dataset.entries) {
      phis.push_back(entry.phi);
      double even = 0;
      for (Bitstring s : entry.shots) even += parity_sign(s) > 0 ? 1.0 : 0.0;
      p_even.push_back(even / static_cast<double>(entry.shots.size()));
    }
    fit.bootstrap_std_error =
        bootstrap_amplitude_sd(phis, p_even, dataset.n, dataset.shots_per_setting,
                               options.bootstrap_resamples, options.bootstrap_seed);
  }
  return fit;
}

ParityFit fit_parity_curve(const ParityOutcomeDataset& dataset,
                           const ParityFitOptions& options) {
  std::vector<ParityPoint> points;
  std::vector<double> phis;
  std::vector<double> p_even;
  points.reserve(dataset.entries.size());
  for (const auto& entry : dataset.entries) {
    points.push_back({entry.phi, parity_from_outcomes(entry.outcomes)});
    phis.push_back(entry.phi);
    double even = 0;
    for (std::int8_t v : entry.outcomes) even += v > 0 ? 1.0 : 0.0;
    p_even.push_back(even / static_cast<double>(entry.outcomes.size()));
  }
  ParityFit fit = fit_parity_points(points, dataset.n, dataset.shots_per_setting);
  if (options.bootstrap_resamples > 1 && dataset.shots_per_setting > 0) {
    fit.bootstrap_std_error =
        bootstrap_amplitude_sd(phis, p_even, dataset.n, dataset.shots_per_setting,
                               options.bootstrap_resamples, options.bootstrap_seed);
  }
  return fit;
}

Estimate estimate_populations_camera(std::span<const Bitstring> shots, int n_qubits) {
  if (shots.empty()) throw std::invalid_argument("estimate_populations_camera: empty input");
  const Bitstring ones = (n_qubits >= 32) ? ~Bitstring{0} : ((Bitstring{1} << n_qubits) - 1);
  double hits = 0.0;
  for (Bitstring s : shots) hits += (s == 0 || s == ones) ? 1.0 : 0.0;
  const double count = static_cast<double>(shots.size());
  const double p = hits / count;
  return Estimate{p, std::sqrt(std::max(p * (1.0 - p), 0.0) / count),
                  static_cast<std::int64_t>(shots.size())};
}

std::vector<double> diagonal_histogram(std::span<const Bitstring> shots, int n_qubits) {
  std::vector<double> hist(std::size_t{1} << n_qubits, 0.0);
  for (Bitstring s : shots) hist[s] += 1.0;
  for (double& v : hist) v /= static_cast<double>(shots.size());
  return hist;
}

std::vector<double> pmt_class_likelihoods(int counts, double lambda_ion, double lambda_bg,
                                          int n_qubits) {
  if (!(lambda_ion > 0.0) || lambda_bg < 0.0) {
    throw std::invalid_argument("pmt_class_likelihoods: invalid rates");
  }
  if (counts < 0) throw std::invalid_argument("pmt_class_likelihoods: negative counts");
  std::vector<double> log_lik(static_cast<std::size_t>(n_qubits) + 1);
  double max_log = -kInf;
  for (int k = 0; k <= n_qubits; ++k) {
    const double mean = k * lambda_ion + lambda_bg;
    double ll;
    if (mean == 0.0) {
      ll = counts == 0 ? 0.0 : -kInf;
    } else {
      ll = counts * std::log(mean) - mean - std::lgamma(counts + 1.0);
    }
    log_lik[static_cast<std::size_t>(k)] = ll;
    max_log = std::max(max_log, ll);
  }
  std::vector<double> lik(log_lik.size());
  double total = 0.0;
  for (std::size_t k = 0; k < lik.size(); ++k) {
    lik[k] = std::isfinite(log_lik[k]) ? std::exp(log_lik[k] - max_log) : 0.0;
    total += lik[k];
  }
  for (double& v : lik) v /= total;
  return lik;
}

BrightPosterior bayes_populations_pmt(std::span<const PmtShot> shots, double lambda_ion,
                                      double lambda_bg, int n_qubits, std::uint64_t seed,
                                      const GibbsOptions& options) {
  if (shots.empty()) throw std::invalid_argument("bayes_populations_pmt: empty input");
  const std::size_t classes = static_cast<std::size_t>(n_qubits) + 1;

  std::vector<std::vector<double>> lik(shots.size());
  std::vector<std::size_t> assignment(shots.size());
  for (std::size_t i = 0; i < shots.size(); ++i) {
    lik[i] = pmt_class_likelihoods(shots[i].counts, lambda_ion, lambda_bg, n_qubits);
    assignment[i] = static_cast<std::size_t>(
        std::max_element(lik[i].begin(), lik[i].end()) - lik[i].begin());
  }

  rng::Xoshiro256 gen(seed);
  std::vector<double> q(classes, 1.0 / classes);
  std::vector<double> counts(classes, 0.0);

  rng::KahanSum p_sum, p_sq, par_sum, par_sq;
  std::vector<double> q_sum(classes, 0.0), q_sq(classes, 0.0);

  const int total_sweeps = options.burn_in + options.samples;
  for (int sweep = 0; sweep < total_sweeps; ++sweep) {
    std::fill(counts.begin(), counts.end(), 0.0);
    for (std::size_t i = 0; i < shots.size(); ++i) counts[assignment[i]] += 1.0;

    // q | k: Dirichlet(1 + class counts)
    double norm = 0.0;
    for (std::size_t k = 0; k < classes; ++k) {
      q[k] = gen.gamma(1.0 + counts[k]);
      norm += q[k];
    }
    for (double& v : q) v /= norm;

    // k_i | q: categorical proportional to q_k L_i(k)
    for (std::size_t i = 0; i < shots.size(); ++i) {
      double total = 0.0;
      for (std::size_t k = 0; k < classes; ++k) total += q[k] * lik[i][k];
      double u = gen.uniform01() * total;
      std::size_t pick = classes - 1;
      for (std::size_t k = 0; k < classes; ++k) {
        u -= q[k] * lik[i][k];
        if (u <= 0.0) {
          pick = k;
          break;
        }
      }
      assignment[i] = pick;
    }

    if (sweep >= options.burn_in) {
      const double p = q.front() + q.back();
      double parity = 0.0;
      for (std::size_t k = 0; k < classes; ++k) parity += ((k % 2 == 0) ? q[k] : -q[k]);
      p_sum.add(p);
      p_sq.add(p * p);
      par_sum.add(parity);
      par_sq.add(parity * parity);
      for (std::size_t k = 0; k < classes; ++k) {
        q_sum[k] += q[k];
        q_sq[k] += q[k] * q[k];
      }
    }
  }

  const double n_rec = options.samples;
  auto moments = [n_rec](double sum, double sq) {
    const double mean = sum / n_rec;
    const double var = std::max(sq / n_rec - mean * mean, 0.0);
    return std::pair<double, double>{mean, std::sqrt(var)};
  };

  BrightPosterior posterior;
  posterior.q_mean.resize(classes);
  posterior.q_sd.resize(classes);
  for (std::size_t k = 0; k < classes; ++k) {
    const auto [mean, sd] = moments(q_sum[k], q_sq[k]);
    posterior.q_mean[k] = mean;
    posterior.q_sd[k] = sd;
  }
  const auto [p_mean, p_sd] = moments(p_sum.value(), p_sq.value());
  posterior.populations = Estimate{p_mean, p_sd, static_cast<std::int64_t>(shots.size())};
  const auto [par_mean, par_sd] = moments(par_sum.value(), par_sq.value());
  posterior.parity = Estimate{par_mean, par_sd, static_cast<std::int64_t>(shots.size())};
  return posterior;
}

Estimate ghz_fidelity(const Estimate& populations, const Estimate& coherence) {
  Estimate f;
  f.value = 0.5 * (populations.value + coherence.value);
  f.std_error = 0.5 * std::hypot(populations.std_error, coherence.std_error);
  f.n_samples = populations.n_samples + coherence.n_samples;
  return f;
}

namespace {

CriterionResult make_result(std::string name, double statistic, double threshold,
                            double stat_error) {
  CriterionResult result;
  result.name = std::move(name);
  result.statistic = statistic;
  result.threshold = threshold;
  result.margin = statistic - threshold;
  result.exact = stat_error == 0.0;
  result.sigma_confidence = result.exact ? (result.margin > 0.0 ? kInf : -kInf)
                                         : result.margin / stat_error;
  result.passed = result.margin > 0.0;
  return result;
}

void check_diagonal(const std::vector<double>& diag, int n_qubits) {
  if (diag.size() != (std::size_t{1} << n_qubits)) {
    throw std::invalid_argument("diagonal_populations must have 2^n entries");
  }
  double total = 0.0;
  for (double v : diag) {
    if (v < -1e-12) throw std::invalid_argument("negative diagonal population");
    total += v;
  }
  if (total > 1.0 + 1e-9) throw std::invalid_argument("diagonal populations exceed 1");
}

}  // namespace

CriterionResult criterion_fidelity_threshold(const Estimate& fidelity) {
  return make_result("fidelity_threshold", fidelity.value, 0.5, fidelity.std_error);
}

CriterionResult criterion_distillability(const Estimate& coherence_magnitude,
                                         const std::vector<double>& diagonal_populations,
                                         int n_qubits) {
  check_diagonal(diagonal_populations, n_qubits);
  const Bitstring ones = (Bitstring{1} << n_qubits) - 1;
  double threshold = 0.0;
  for (Bitstring s = 1; s < (Bitstring{1} << (n_qubits - 1)); ++s) {
    threshold = std::max(threshold, diagonal_populations[s] + diagonal_populations[s ^ ones]);
  }
  return make_result("distillability", 2.0 * coherence_magnitude.value, threshold,
                     2.0 * coherence_magnitude.std_error);
}

CriterionResult criterion_genuine_entanglement(const Estimate& coherence_magnitude,
                                               const std::vector<double>& diagonal_populations,
                                               int n_qubits) {
  check_diagonal(diagonal_populations, n_qubits);
  const Bitstring ones = (Bitstring{1} << n_qubits) - 1;
  double threshold = 0.0;
  for (Bitstring s = 1; s < (Bitstring{1} << (n_qubits - 1)); ++s) {
    threshold += std::sqrt(std::max(diagonal_populations[s], 0.0) *
                           std::max(diagonal_populations[s ^ ones], 0.0));
  }
  return make_result("genuine_entanglement", coherence_magnitude.value, threshold,
                     coherence_magnitude.std_error);
}

CriterionBootstrap bootstrap_criteria(std::span<const Bitstring> population_shots,
                                      const ParityDataset& parity_data, int n_qubits,
                                      int n_resamples, std::uint64_t seed) {
  if (n_resamples < 2) throw std::invalid_argument("bootstrap_criteria: need >= 2 resamples");
  std::vector<double> phis;
  std::vector<double> p_even;
  for (const auto& entry : parity_data.entries) {
    phis.push_back(entry.phi);
    double even = 0;
    for (Bitstring s : entry.shots) even += parity_sign(s) > 0 ? 1.0 : 0.0;
    p_even.push_back(even / static_cast<double>(entry.shots.size()));
  }

  rng::KahanSum f_sum, f_sq, d_sum, d_sq, g_sum, g_sq;
  std::vector<Bitstring> resampled(population_shots.size());
  std::vector<ParityPoint> points(phis.size());
  for (int r = 0; r < n_resamples; ++r) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(r)));
    for (std::size_t i = 0; i < resampled.size(); ++i) {
      resampled[i] = population_shots[static_cast<std::size_t>(
          gen.below(static_cast<std::uint64_t>(population_shots.size())))];
    }
    for (std::size_t i = 0; i < phis.size(); ++i) {
      int even = 0;
      for (int s = 0; s < parity_data.shots_per_setting; ++s) {
        even += gen.uniform01() < p_even[i] ? 1 : 0;
      }
      const double mean = 2.0 * even / parity_data.shots_per_setting - 1.0;
      points[i] = {phis[i], Estimate{mean, 0.0, parity_data.shots_per_setting}};
    }
    const ParityFit fit = fit_parity_points(points, n_qubits, parity_data.shots_per_setting);
    const Estimate populations = estimate_populations_camera(resampled, n_qubits);
    const auto diag = diagonal_histogram(resampled, n_qubits);
    const Estimate c_mag{0.5 * fit.amplitude.value, 0.0, fit.amplitude.n_samples};

    const double f_margin =
        ghz_fidelity(populations, fit.amplitude).value - 0.5;
    const double d_margin = criterion_distillability(c_mag, diag, n_qubits).margin;
    const double g_margin = criterion_genuine_entanglement(c_mag, diag, n_qubits).margin;
    f_sum.add(f_margin);
    f_sq.add(f_margin * f_margin);
    d_sum.add(d_margin);
    d_sq.add(d_margin * d_margin);
    g_sum.add(g_margin);
    g_sq.add(g_margin * g_margin);
  }

  auto spread = [n_resamples](const rng::KahanSum& sum, const rng::KahanSum& sq) {
    const double count = n_resamples;
    const double mean = sum.value() / count;
    const double var = (sq.value() - count * mean * mean) / (count - 1.0);
    return std::sqrt(std::max(var, 0.0));
  };
  CriterionBootstrap out;
  out.fidelity_sigma = spread(f_sum, f_sq);
  out.distillability_sigma = spread(d_sum, d_sq);
  out.genuine_sigma = spread(g_sum, g_sq);
  return out;
}

std::optional<Estimate> coherence_to_error_probability(const Estimate& c_t,
                                                       const Estimate& c_0) {
  if (!(c_0.value > 0.0)) throw std::invalid_argument("reference coherence must be positive");
  if (c_t.value <= 0.0) return std::nullopt;
  Estimate eps;
  eps.value = -0.5 * std::log(c_t.value / c_0.value);
  eps.std_error = 0.5 * std::hypot(c_t.std_error / c_t.value, c_0.std_error / c_0.value);
  eps.n_samples = c_t.n_samples;
  return eps;
}

namespace {

// Decay shapes parameterized with log-timescales so Gauss-Newton steps can
// never leave the domain. p = (C0, ln T [, ln gamma]).
double decay_model(DecayModel model, const Eigen::VectorXd& p, double t) {
  const double c0 = p(0);
  switch (model) {
    case DecayModel::exponential:
      return c0 * std::exp(-t / std::exp(p(1)));
    case DecayModel::gaussian: {
      const double x = t / std::exp(p(1));
      return c0 * std::exp(-0.5 * x * x);
    }
    case DecayModel::full_ou:
    default: {
      const double t2 = std::exp(p(1));
      const double g = std::exp(p(2));
      const double hump = std::expm1(-g * t) + g * t;
      return c0 * std::exp(-hump / (t2 * g));
    }
  }
}

int decay_param_count(DecayModel model) { return model == DecayModel::full_ou ? 3 : 2; }

Eigen::VectorXd decay_initial_guess(const DecayCurve& curve, DecayModel model) {
  // Log-linear regression on the positive points against t (exponential,
  // full_ou) or t^2 (gaussian).
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  double t_scale = 0.0;
  for (const auto& pt : curve.points) {
    t_scale = std::max(t_scale, pt.t);
    if (pt.coherence.value <= 0.0) continue;
    const double x = model == DecayModel::gaussian ? pt.t * pt.t : pt.t;
    const double y = std::log(pt.coherence.value);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m < 2) throw FitFailure("decay fit: fewer than two positive coherence points");
  const double denom = m * sxx - sx * sx;
  double slope = denom != 0.0 ? (m * sxy - sx * sy) / denom : -1.0;
  const double intercept = (sy - slope * sx) / m;
  if (slope >= 0.0) slope = -1.0 / std::max(t_scale, 1e-9);

  Eigen::VectorXd p(decay_param_count(model));
  p(0) = std::exp(intercept);
  switch (model) {
    case DecayModel::exponential:
      p(1) = std::log(-1.0 / slope);
      break;
    case DecayModel::gaussian:
      p(1) = 0.5 * std::log(-0.5 / slope);
      break;
    case DecayModel::full_ou:
      p(1) = std::log(-1.0 / slope);
      p(2) = std::log(2.0 / std::max(t_scale, 1e-9));
      break;
  }
  return p;
}

}  // namespace

DecayFit fit_decay_timescale(const DecayCurve& curve, DecayModel model) {
  const auto m = static_cast<int>(curve.points.size());
  if (m < 3) throw std::invalid_argument("decay fit: need at least 3 points");
  for (int i = 1; i < m; ++i) {
    if (!(curve.points[static_cast<std::size_t>(i)].t >
          curve.points[static_cast<std::size_t>(i - 1)].t)) {
      throw std::invalid_argument("decay fit: times must be strictly increasing");
    }
  }

  bool weighted = true;
  for (const auto& pt : curve.points) weighted = weighted && pt.coherence.std_error > 0.0;
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) {
    const double s = curve.points[static_cast<std::size_t>(i)].coherence.std_error;
    w(i) = weighted ? 1.0 / (s * s) : 1.0;
  }

  const int n_params = decay_param_count(model);
  Eigen::VectorXd p = decay_initial_guess(curve, model);

  auto cost_of = [&](const Eigen::VectorXd& params) {
    double total = 0.0;
    for (int i = 0; i < m; ++i) {
      const auto& pt = curve.points[static_cast<std::size_t>(i)];
      const double r = pt.coherence.value - decay_model(model, params, pt.t);
      total += w(i) * r * r;
    }
    return total;
  };

  double lambda = 1e-6;
  double cost = cost_of(p);
  bool converged = false;
  Eigen::MatrixXd jtj_final = Eigen::MatrixXd::Zero(n_params, n_params);
  for (int iter = 0; iter < 500 && !converged; ++iter) {
    Eigen::MatrixXd jacobian(m, n_params);
    Eigen::VectorXd residual(m);
    for (int i = 0; i < m; ++i) {
      const auto& pt = curve.points[static_cast<std::size_t>(i)];
      residual(i) = pt.coherence.value - decay_model(model, p, pt.t);
      for (int j = 0; j < n_params; ++j) {
        const double step = std::max(std::abs(p(j)) * 1e-7, 1e-9);
        Eigen::VectorXd p_hi = p;
        Eigen::VectorXd p_lo = p;
        p_hi(j) += step;
        p_lo(j) -= step;
        jacobian(i, j) =
            (decay_model(model, p_hi, pt.t) - decay_model(model, p_lo, pt.t)) / (2.0 * step);
      }
    }
    const Eigen::MatrixXd jtw = jacobian.transpose() * w.asDiagonal();
    const Eigen::MatrixXd jtj = jtw * jacobian;
    const Eigen::VectorXd grad = jtw * residual;
    jtj_final = jtj;

    bool improved = false;
    for (int attempt = 0; attempt < 25 && !improved; ++attempt) {
      Eigen::MatrixXd damped = jtj;
      damped.diagonal() *= (1.0 + lambda);
      damped.diagonal().array() += 1e-300;
      const Eigen::VectorXd delta = damped.ldlt().solve(grad);
      const Eigen::VectorXd candidate = p + delta;
      const double candidate_cost = cost_of(candidate);
      if (std::isfinite(candidate_cost) && candidate_cost <= cost + 1e-300) {
        const double drop = cost - candidate_cost;
        p = candidate;
        converged = drop <= 1e-14 * (cost + 1e-30) || delta.norm() <= 1e-13;
        cost = candidate_cost;
        lambda = std::max(lambda * 0.3, 1e-12);
        improved = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!improved) {
      std::ostringstream msg;
      msg << "decay fit: no descent direction (cost " << cost << ", lambda " << lambda << ")";
      throw FitFailure(msg.str());
    }
  }
  if (!converged) throw FitFailure("decay fit: did not converge within 500 iterations");

  const double dof = std::max(m - n_params, 1);
  const double scale2 = weighted ? 1.0 : cost / dof;
  Eigen::MatrixXd covariance = Eigen::MatrixXd::Zero(n_params, n_params);
  const Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj_final);
  if (lu.isInvertible()) covariance = lu.inverse() * scale2;

  DecayFit fit;
  fit.model = model;
  std::int64_t n_samples = 0;
  for (const auto& pt : curve.points) n_samples += pt.coherence.n_samples;
  fit.amplitude = Estimate{p(0), std::sqrt(std::max(covariance(0, 0), 0.0)), n_samples};
  const double timescale = std::exp(p(1));
  fit.timescale = Estimate{timescale,
                           timescale * std::sqrt(std::max(covariance(1, 1), 0.0)), n_samples};
  if (model == DecayModel::full_ou) {
    const double g = std::exp(p(2));
    fit.gamma = Estimate{g, g * std::sqrt(std::max(covariance(2, 2), 0.0)), n_samples};
  }
  return fit;
}

ScalingFit fit_scaling_exponent(std::span<const ScalingPoint> points) {
  std::set<int> distinct;
  for (const auto& pt : points) {
    if (pt.n < 1) throw std::invalid_argument("scaling fit: qubit numbers must be >= 1");
    if (!(pt.ratio.value > 0.0)) {
      throw std::invalid_argument("scaling fit: ratios must be positive");
    }
    distinct.insert(pt.n);
  }
  if (distinct.size() < 2) {
    throw std::invalid_argument("scaling fit: need at least 2 distinct qubit numbers");
  }

  const auto m = static_cast<int>(points.size());
  bool all_exact = true;
  for (const auto& pt : points) all_exact = all_exact && pt.ratio.std_error == 0.0;

  Eigen::MatrixXd design(m, 2);
  Eigen::VectorXd y(m);
  Eigen::VectorXd w(m);
  for (int i = 0; i < m; ++i) {
    const auto& pt = points[static_cast<std::size_t>(i)];
    design(i, 0) = std::log(static_cast<double>(pt.n));
    design(i, 1) = 1.0;
    y(i) = std::log(pt.ratio.value);
    if (all_exact) {
      w(i) = 1.0;
    } else {
      const double s = std::max(pt.ratio.std_error / pt.ratio.value, 1e-9);
      w(i) = 1.0 / (s * s);
    }
  }
  const Eigen::MatrixXd xtw = design.transpose() * w.asDiagonal();
  const Eigen::Matrix2d normal = xtw * design;
  const Eigen::FullPivLU<Eigen::Matrix2d> lu(normal);
  if (!lu.isInvertible()) throw FitFailure("scaling fit: degenerate design");
  const Eigen::Vector2d beta = lu.solve(xtw * y);
  const Eigen::Matrix2d covariance = lu.inverse();
  const Eigen::VectorXd residual = y - design * beta;
  const double chi2 = (residual.array().square() * w.array()).sum();

  ScalingFit fit;
  fit.alpha = beta(0);
  if (all_exact) {
    fit.alpha_err =
        m > 2 ? std::sqrt(std::max(covariance(0, 0) * chi2 / (m - 2), 0.0)) : kInf;
  } else {
    fit.alpha_err = std::sqrt(std::max(covariance(0, 0), 0.0));
  }
  fit.points.assign(points.begin(), points.end());
  return fit;
}

}  // namespace ghzsim
