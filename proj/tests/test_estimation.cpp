#include "doctest.h"

#include <cmath>

#include "ghzsim/estimation.hpp"
#include "ghzsim/measurement.hpp"
#include "ghzsim/noise_kernels.hpp"
#include "ghzsim/register_model.hpp"
#include "ghzsim/rng.hpp"

using namespace ghzsim;

namespace {

std::vector<ParityPoint> noiseless_points(int n, double amplitude, double phase, double offset,
                                          int count) {
  std::vector<ParityPoint> points;
  for (int j = 0; j < count; ++j) {
    const double phi = 2.0 * M_PI / n * j / (count - 1);
    points.push_back({phi, Estimate{amplitude * std::cos(n * phi + phase) + offset, 0.0, 0}});
  }
  return points;
}

struct TableRow {
  int n;
  double populations, populations_err;
  double coherence, coherence_err;
  double fidelity;
};

// Measured values for the nine register sizes (percent).
const TableRow kTable[] = {
    {2, 99.50, 0.07, 97.8, 0.3, 98.6},  {3, 97.6, 0.2, 96.5, 0.6, 97.0},
    {4, 97.5, 0.2, 93.9, 0.5, 95.7},    {5, 96.0, 0.4, 92.9, 0.8, 94.4},
    {6, 91.6, 0.4, 86.8, 0.8, 89.2},    {8, 84.7, 0.4, 78.7, 0.7, 81.7},
    {10, 67.0, 0.8, 58.2, 0.9, 62.6},   {12, 53.3, 0.9, 41.6, 1.0, 47.4},
    {14, 56.2, 1.1, 45.4, 1.3, 50.8},
};

}  // namespace

TEST_CASE("parity fit: exact recovery on noiseless data") {
  rng::Xoshiro256 gen(42);
  for (int n : {1, 2, 5, 8, 14}) {
    const double amplitude = 0.05 + 0.9 * gen.uniform01();
    const double phase = 2.0 * M_PI * gen.uniform01() - M_PI;
    const double offset = 0.04 * (gen.uniform01() - 0.5);
    const auto points = noiseless_points(n, amplitude, phase, offset, 3 * n + 1);
    const ParityFit fit = fit_parity_points(points, n);
    CHECK(std::abs(fit.amplitude.value - amplitude) < 1e-9);
    CHECK(std::abs(std::remainder(fit.phase_offset - phase, 2.0 * M_PI)) < 1e-9);
    CHECK(std::abs(fit.vertical_offset - offset) < 1e-9);
    CHECK(fit.amplitude.std_error < 1e-9);
  }
}

TEST_CASE("parity fit: the eight-ion coherence anchor") {
  const auto points = noiseless_points(8, 0.787, 0.35, 0.0, 25);
  const ParityFit fit = fit_parity_points(points, 8);
  CHECK(std::abs(fit.amplitude.value - 0.787) < 1e-9);
}

TEST_CASE("parity fit: preconditions") {
  std::vector<ParityPoint> two{{0.0, {1.0, 0.0, 0}}, {0.5, {0.0, 0.0, 0}}};
  CHECK_THROWS_AS(fit_parity_points(two, 2), std::invalid_argument);

  // Three settings that do not span a period.
  std::vector<ParityPoint> narrow{
      {0.0, {1.0, 0.0, 0}}, {0.1, {0.5, 0.0, 0}}, {0.2, {0.3, 0.0, 0}}};
  CHECK_THROWS_AS(fit_parity_points(narrow, 2), std::invalid_argument);
}

TEST_CASE("parity fit: sampled five-qubit register at realistic coherence") {
  // True C = 0.929, 100 shots per setting, 3n+1 settings.
  BranchPairState state = ghz_ideal(5);
  state.coherence = complexd{0.929 / 2.0, 0.0};
  ParityDataset dataset;
  dataset.n = 5;
  dataset.shots_per_setting = 100;
  const int settings = 16;
  for (int j = 0; j < settings; ++j) {
    const double phi = 2.0 * M_PI / 5 * j / (settings - 1);
    dataset.entries.push_back(
        {phi, sample_camera_shots(state, phi, 100, rng::derive_stream(2026, static_cast<std::uint64_t>(j)))});
  }
  ParityFit fit = fit_parity_curve(dataset);
  CHECK(std::abs(fit.amplitude.value - 0.929) < 3.0 * fit.amplitude.std_error);
  CHECK(fit.amplitude.std_error < 0.02);
  CHECK(fit.bootstrap_std_error > 0.0);
  // Bootstrap and analytic errors agree within 20%.
  CHECK(std::abs(fit.bootstrap_std_error - fit.amplitude.std_error) <
        0.2 * fit.amplitude.std_error);
}

TEST_CASE("parity fit: zero coherence is consistent with zero") {
  BranchPairState state = ghz_ideal(4);
  state.coherence = complexd{0.0, 0.0};
  ParityDataset dataset;
  dataset.n = 4;
  dataset.shots_per_setting = 100;
  for (int j = 0; j < 13; ++j) {
    const double phi = 2.0 * M_PI / 4 * j / 12.0;
    dataset.entries.push_back(
        {phi, sample_camera_shots(state, phi, 100, rng::derive_stream(7, static_cast<std::uint64_t>(j)))});
  }
  const ParityFit fit = fit_parity_curve(dataset);
  CHECK(fit.amplitude.value < 2.0 * fit.amplitude.std_error + 1e-12);
}

TEST_CASE("population estimators") {
  std::vector<Bitstring> ideal{0, 15, 15, 0};
  CHECK(estimate_populations_camera(ideal, 4).value == 1.0);

  // Uniform random strings at n = 8: branch fraction ~ 2/256.
  rng::Xoshiro256 gen(5150);
  std::vector<Bitstring> uniform(20000);
  for (auto& s : uniform) s = static_cast<Bitstring>(gen.below(256));
  const Estimate p = estimate_populations_camera(uniform, 8);
  CHECK(std::abs(p.value - 2.0 / 256.0) < 3.0 * std::sqrt((2.0 / 256.0) / 20000.0));

  // Synthetic register with P = 0.847 sampled through the direct channel.
  BranchPairState state = ghz_ideal(8);
  state.p_a = state.p_b = 0.847 / 2.0;
  state.coherence = complexd{0.787 / 2.0, 0.0};
  state.p_leak = 1.0 - 0.847;
  const auto shots = measure_populations_direct(state, 10000, 31);
  const Estimate p_hat = estimate_populations_camera(shots, 8);
  CHECK(std::abs(p_hat.value - 0.847) < 3.0 * p_hat.std_error);
}

TEST_CASE("pmt likelihoods: near-certain single-shot classification") {
  const auto lik = pmt_class_likelihoods(3, 20.0, 1.0, 1);
  REQUIRE(lik.size() == 2);
  CHECK(lik[0] > 0.9999);
  CHECK(lik[0] / lik[1] > 1e4);

  // Zero background: zero counts pin the dark class.
  const auto dark = pmt_class_likelihoods(0, 20.0, 0.0, 3);
  CHECK(dark[0] == doctest::Approx(1.0).epsilon(1e-8));
  for (std::size_t k = 1; k < dark.size(); ++k) CHECK(dark[k] <= std::exp(-20.0));
}

TEST_CASE("bayes pmt: concentrated truth") {
  std::vector<double> dark(9, 0.0);
  dark[0] = 1.0;
  const auto shots = sample_pmt_counts(dark, 20.0, 1.0, 1000, 8);
  const auto posterior = bayes_populations_pmt(shots, 20.0, 1.0, 8, 99);
  CHECK(posterior.populations.value > 0.99);
  CHECK(posterior.q_mean[0] > 0.98);
}

TEST_CASE("bayes pmt: recovers a GHZ-like bright distribution") {
  std::vector<double> truth(9, 0.0);
  truth[0] = 0.45;
  truth[8] = 0.40;
  truth[4] = 0.15;
  const auto shots = sample_pmt_counts(truth, 20.0, 1.0, 500, 313);
  const auto posterior = bayes_populations_pmt(shots, 20.0, 1.0, 8, 314);
  CHECK(std::abs(posterior.populations.value - 0.85) < 3.0 * posterior.populations.std_error);
}

TEST_CASE("ghz fidelity: every table row reproduces to the printed rounding") {
  for (const auto& row : kTable) {
    const Estimate populations{row.populations / 100.0, row.populations_err / 100.0, 0};
    const Estimate coherence{row.coherence / 100.0, row.coherence_err / 100.0, 0};
    const Estimate fidelity = ghz_fidelity(populations, coherence);
    CHECK(std::abs(fidelity.value - row.fidelity / 100.0) <= 0.0005 + 1e-12);
  }
  const Estimate perfect = ghz_fidelity({1.0, 0.0, 0}, {1.0, 0.0, 0});
  CHECK(perfect.value == 1.0);
  CHECK(perfect.std_error == 0.0);
}

TEST_CASE("fidelity threshold criterion") {
  // The 14-ion verdict: margin 0.8 percentage points at ~0.9 sigma.
  const Estimate f14 = ghz_fidelity({0.562, 0.011, 0}, {0.454, 0.013, 0});
  const auto c14 = criterion_fidelity_threshold(f14);
  CHECK(c14.passed);
  CHECK(c14.margin == doctest::Approx(0.008).epsilon(1e-9));
  CHECK(c14.sigma_confidence > 0.85);
  CHECK(c14.sigma_confidence < 0.95);

  const auto c12 = criterion_fidelity_threshold({0.474, 0.007, 0});
  CHECK_FALSE(c12.passed);

  const auto exact = criterion_fidelity_threshold({1.0, 0.0, 0});
  CHECK(exact.passed);
  CHECK(exact.exact);
  CHECK(std::isinf(exact.sigma_confidence));
}

TEST_CASE("distillability criterion") {
  // Ideal GHZ: no leaked population, threshold zero.
  std::vector<double> ideal(8, 0.0);
  ideal[0] = 0.5;
  ideal[7] = 0.5;
  const auto pass = criterion_distillability({0.5, 0.01, 0}, ideal, 3);
  CHECK(pass.passed);
  CHECK(pass.threshold == 0.0);

  const auto fail = criterion_distillability({0.0, 0.01, 0}, ideal, 3);
  CHECK_FALSE(fail.passed);

  // Named three-qubit example: rho_001 = rho_110 = 0.1, |c| = 0.12.
  std::vector<double> diag(8, 0.0);
  diag[0] = 0.3;
  diag[7] = 0.3;
  diag[1] = 0.1;  // 001
  diag[6] = 0.1;  // 110
  const auto named = criterion_distillability({0.12, 0.01, 0}, diag, 3);
  CHECK(named.statistic == doctest::Approx(0.24));
  CHECK(named.threshold == doctest::Approx(0.2));
  CHECK(named.passed);
}

TEST_CASE("genuine entanglement criterion") {
  std::vector<double> ideal(16, 0.0);
  ideal[0] = 0.5;
  ideal[15] = 0.5;
  CHECK(criterion_genuine_entanglement({0.5, 0.01, 0}, ideal, 4).passed);

  // Uniform diagonal: threshold (2^{n-1} - 1) 2^{-n}, so c = 0 fails by it.
  for (int n : {2, 3, 5}) {
    std::vector<double> uniform(std::size_t{1} << n, std::ldexp(1.0, -n));
    const auto result = criterion_genuine_entanglement({0.0, 0.0, 0}, uniform, n);
    CHECK_FALSE(result.passed);
    const double expected = -(std::ldexp(1.0, n - 1) - 1.0) * std::ldexp(1.0, -n);
    CHECK(result.margin == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("genuine criterion is the more stringent one on symmetric leak") {
  // For leak symmetric under complementation the distillability threshold is
  // a max of pair sums while the genuine threshold is the sum over pairs, so
  // failing distillability implies failing the genuine criterion.
  rng::Xoshiro256 gen(606);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(gen.below(5));
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> diag(dim, 0.0);
    double leak_total = 0.0;
    for (Bitstring s = 1; s < dim / 2; ++s) {
      const double mass = gen.uniform01() < 0.3 ? 0.1 * gen.uniform01() : 0.0;
      diag[s] = mass;
      diag[s ^ (dim - 1)] = mass;
      leak_total += 2.0 * mass;
    }
    if (leak_total > 0.9) continue;
    diag[0] = diag[dim - 1] = (1.0 - leak_total) / 2.0;
    const double c_mag = gen.uniform01() * 0.5;

    const auto distill = criterion_distillability({c_mag, 0.0, 0}, diag, n);
    const auto genuine = criterion_genuine_entanglement({c_mag, 0.0, 0}, diag, n);
    if (!distill.passed) CHECK_FALSE(genuine.passed);
    CHECK(genuine.threshold >= distill.threshold / 2.0 - 1e-12);
  }
}

TEST_CASE("criterion margins are monotone under added leak") {
  rng::Xoshiro256 gen(707);
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(gen.below(4));
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> diag(dim, 0.0);
    diag[0] = diag[dim - 1] = 0.45;
    std::vector<double> more = diag;
    // Move branch population onto a random complementary pair.
    const Bitstring target = 1 + static_cast<Bitstring>(gen.below(dim / 2 - 1));
    const double moved = 0.05 + 0.2 * gen.uniform01();
    more[0] -= moved / 2.0;
    more[dim - 1] -= moved / 2.0;
    more[target] += moved / 2.0;
    more[target ^ (dim - 1)] += moved / 2.0;

    const Estimate c_mag{0.4, 0.0, 0};
    CHECK(criterion_distillability(c_mag, more, n).margin <=
          criterion_distillability(c_mag, diag, n).margin + 1e-12);
    CHECK(criterion_genuine_entanglement(c_mag, more, n).margin <=
          criterion_genuine_entanglement(c_mag, diag, n).margin + 1e-12);
  }
}

TEST_CASE("coherence to error probability") {
  CHECK(coherence_to_error_probability({0.8, 0.0, 0}, {0.8, 0.0, 0})->value == 0.0);
  CHECK(coherence_to_error_probability({std::exp(-2.0), 0.0, 0}, {1.0, 0.0, 0})->value ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK_FALSE(coherence_to_error_probability({0.0, 0.01, 0}, {1.0, 0.0, 0}).has_value());
  CHECK_FALSE(coherence_to_error_probability({-0.2, 0.01, 0}, {1.0, 0.0, 0}).has_value());

  // Round trip through the dephasing channel at the analytic anchor.
  const NoiseParams params{1.0, 1.0};
  const auto decayed = apply_gaussian_dephasing(ghz_ideal(1), params, 1.0);
  const auto eps = coherence_to_error_probability(
      {2.0 * std::abs(decayed.coherence), 0.0, 0}, {1.0, 0.0, 0});
  REQUIRE(eps.has_value());
  CHECK(eps->value == doctest::Approx(0.18394).epsilon(1e-4));
  CHECK(eps->value == doctest::Approx(error_probability(1, params, 1.0)).epsilon(1e-12));
}

TEST_CASE("decay fit: exponential recovery at a 95 ms timescale") {
  const double t2 = 0.095;
  DecayCurve curve;
  for (int i = 0; i <= 9; ++i) {
    const double t = 0.02 * i;
    curve.points.push_back({t, Estimate{std::exp(-t / t2), 0.0, 0}});
  }
  const DecayFit fit = fit_decay_timescale(curve, DecayModel::exponential);
  CHECK(std::abs(fit.timescale.value - t2) / t2 < 0.02);
  CHECK(fit.amplitude.value == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("decay fit: dfs lifetime-limited curve") {
  const double t1 = 1.17;
  DecayCurve curve;
  for (int i = 0; i <= 9; ++i) {
    const double t = 0.08 * i;
    curve.points.push_back({t, Estimate{std::exp(-4.0 * t / t1), 0.0, 0}});
  }
  const DecayFit fit = fit_decay_timescale(curve, DecayModel::exponential);
  CHECK(fit.timescale.value == doctest::Approx(0.2925).epsilon(1e-6));
}

TEST_CASE("decay fit: gaussian and full-kernel self consistency") {
  {
    const double tau = 0.7;
    DecayCurve curve;
    for (int i = 0; i <= 11; ++i) {
      const double t = 0.12 * i;
      curve.points.push_back({t, Estimate{std::exp(-0.5 * (t / tau) * (t / tau)), 0.0, 0}});
    }
    const DecayFit fit = fit_decay_timescale(curve, DecayModel::gaussian);
    CHECK(std::abs(fit.timescale.value - tau) / tau < 0.02);
  }
  {
    const NoiseParams params{4.0, 2.0};
    DecayCurve curve;
    for (int i = 0; i <= 14; ++i) {
      const double t = 0.15 * i;
      curve.points.push_back(
          {t, Estimate{std::exp(-2.0 * error_probability(1, params, t)), 0.0, 0}});
    }
    const DecayFit fit = fit_decay_timescale(curve, DecayModel::full_ou);
    CHECK(std::abs(fit.timescale.value - t2_markovian(1, params)) / t2_markovian(1, params) <
          0.02);
    CHECK(std::abs(fit.gamma.value - params.gamma) / params.gamma < 0.05);
  }
}

TEST_CASE("decay fit: failure paths") {
  DecayCurve tiny;
  tiny.points.push_back({0.0, {1.0, 0.0, 0}});
  tiny.points.push_back({1.0, {0.5, 0.0, 0}});
  CHECK_THROWS_AS(fit_decay_timescale(tiny, DecayModel::exponential), std::invalid_argument);

  DecayCurve unordered;
  unordered.points.push_back({0.0, {1.0, 0.0, 0}});
  unordered.points.push_back({1.0, {0.5, 0.0, 0}});
  unordered.points.push_back({0.5, {0.7, 0.0, 0}});
  CHECK_THROWS_AS(fit_decay_timescale(unordered, DecayModel::exponential),
                  std::invalid_argument);

  DecayCurve hopeless;
  for (int i = 0; i < 6; ++i) {
    hopeless.points.push_back({static_cast<double>(i), Estimate{-0.5 - i, 0.0, 0}});
  }
  CHECK_THROWS_AS(fit_decay_timescale(hopeless, DecayModel::exponential), FitFailure);
}

TEST_CASE("scaling exponent: exact laws and validation") {
  std::vector<ScalingPoint> quadratic;
  for (int n : {1, 2, 3, 4, 6, 8}) {
    quadratic.push_back({n, Estimate{static_cast<double>(n) * n, 0.0, 0}});
  }
  const ScalingFit fit = fit_scaling_exponent(quadratic);
  CHECK(std::abs(fit.alpha - 2.0) < 1e-12);
  CHECK(fit.alpha_err < 1e-9);

  std::vector<ScalingPoint> linear;
  for (int n : {1, 2, 4, 8}) linear.push_back({n, Estimate{static_cast<double>(n), 0.0, 0}});
  CHECK(std::abs(fit_scaling_exponent(linear).alpha - 1.0) < 1e-12);

  std::vector<ScalingPoint> negative{{1, {1.0, 0.0, 0}}, {2, {-4.0, 0.1, 0}}, {3, {9.0, 0.1, 0}}};
  CHECK_THROWS_AS(fit_scaling_exponent(negative), std::invalid_argument);

  std::vector<ScalingPoint> lone{{1, {1.0, 0.0, 0}}};
  CHECK_THROWS_AS(fit_scaling_exponent(lone), std::invalid_argument);

  // Two sizes only: exact fit, no residual information for the error.
  std::vector<ScalingPoint> pair{{1, {1.0, 0.0, 0}}, {2, {4.0, 0.0, 0}}};
  const ScalingFit wide = fit_scaling_exponent(pair);
  CHECK(wide.alpha == doctest::Approx(2.0));
  CHECK(std::isinf(wide.alpha_err));
}

TEST_CASE("bootstrap criteria sigma over raw records") {
  const BranchPairState state = branch_pair_with(3, 0, 7, 1.0, 0.84);

  const auto population_shots = measure_populations_direct(state, 400, 11);
  ParityDataset dataset;
  dataset.n = 3;
  dataset.shots_per_setting = 100;
  for (int j = 0; j < 10; ++j) {
    const double phi = 2.0 * M_PI / 3 * j / 9.0;
    dataset.entries.push_back(
        {phi,
         sample_camera_shots(state, phi, 100, rng::derive_stream(77, static_cast<std::uint64_t>(j)))});
  }

  const auto sigmas = bootstrap_criteria(population_shots, dataset, 3, 300, 515);
  CHECK(sigmas.fidelity_sigma > 0.0);
  CHECK(sigmas.fidelity_sigma < 0.1);
  CHECK(sigmas.distillability_sigma > 0.0);
  CHECK(sigmas.genuine_sigma > 0.0);
}
