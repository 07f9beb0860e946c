#include "ghzsim/measurement.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

#include "ghzsim/rng.hpp"

namespace ghzsim {

namespace {

constexpr double kTol = 1e-12;

complexd unit_phase(double angle) { return complexd{std::cos(angle), std::sin(angle)}; }

// (-i)^m for integer m of either sign.
complexd minus_i_pow(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return complexd{1.0, 0.0};
    case 1: return complexd{0.0, -1.0};
    case 2: return complexd{-1.0, 0.0};
    default: return complexd{0.0, 1.0};
  }
}

void require_ghz_branches(const BranchPairState& state, const char* what) {
  const Bitstring ones = (state.n >= 32) ? ~Bitstring{0} : ((Bitstring{1} << state.n) - 1);
  if (!(state.branch_a == 0 && state.branch_b == ones)) {
    throw UnsupportedConfiguration(std::string(what) + ": requires the 0...0/1...1 branch pair");
  }
  if (state.p_leak > kTol) {
    throw UnsupportedConfiguration(std::string(what) +
                                   ": leak population is not representable per qubit");
  }
}

// Uniformly random bitstring with exactly k set bits (partial Fisher-Yates
// over bit positions).
Bitstring random_weight_k_string(int n, int k, rng::Xoshiro256& gen) {
  std::array<int, 32> positions{};
  for (int i = 0; i < n; ++i) positions[static_cast<std::size_t>(i)] = i;
  Bitstring s = 0;
  for (int i = 0; i < k; ++i) {
    const int j = i + static_cast<int>(gen.below(static_cast<std::uint64_t>(n - i)));
    std::swap(positions[static_cast<std::size_t>(i)], positions[static_cast<std::size_t>(j)]);
    s |= Bitstring{1} << positions[static_cast<std::size_t>(i)];
  }
  return s;
}

double binomial_coefficient(int n, int k) {
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c *= static_cast<double>(n - k + i) / i;
  return c;
}

// Per-weight-class probability of the rotated branch-pair block. For any
// complementary pair the rotated outcome distribution is
//   p(s) = 2^{-n} [ (p_a+p_b) + 2 Re(c i^n e^{i delta_k phi}) (-1)^{d_a + k(s)} ],
// where d_a is the number of 0-bits of branch_a; it depends on s only
// through the bit weight k(s).
struct WeightClassLaw {
  double diag = 0.0;       // (p_a + p_b) 2^{-n}
  double osc = 0.0;        // 2 Re(c i^n e^{i delta_k phi}) 2^{-n}
  int sign_offset = 0;     // d_a
  int n = 0;
  double per_string(int k) const {
    const double sign = ((sign_offset + k) % 2 == 0) ? 1.0 : -1.0;
    return diag + sign * osc;
  }
};

WeightClassLaw rotated_class_law(const BranchPairState& state, double phi) {
  const int n = state.n;
  const int weight = dephasing_weight(state);
  const double scale = std::ldexp(1.0, -n);
  const complexd base = state.coherence * minus_i_pow(-n) *
                        unit_phase(static_cast<double>(weight) * phi);
  WeightClassLaw law;
  law.n = n;
  law.diag = (state.p_a + state.p_b) * scale;
  law.osc = 2.0 * base.real() * scale;
  law.sign_offset = n - bit_weight(state.branch_a);
  return law;
}

}  // namespace

double parity_expectation(const BranchPairState& state, double phi) {
  validate(state);
  if (!branches_complementary(state)) {
    throw UnsupportedConfiguration("parity_expectation: branches must be complementary");
  }
  const int weight = dephasing_weight(state);
  const complexd value =
      state.coherence * minus_i_pow(weight) * unit_phase(static_cast<double>(weight) * phi);
  return 2.0 * value.real();
}

std::vector<double> camera_outcome_distribution(const BranchPairState& state, double phi) {
  validate(state);
  require_ghz_branches(state, "camera_outcome_distribution");
  const WeightClassLaw law = rotated_class_law(state, phi);
  const std::size_t dim = std::size_t{1} << state.n;
  std::vector<double> probs(dim);
  for (std::size_t s = 0; s < dim; ++s) {
    const double p = law.per_string(bit_weight(static_cast<Bitstring>(s)));
    if (p < -kTol) throw std::logic_error("camera_outcome_distribution: negative probability");
    probs[s] = std::max(p, 0.0);
  }
  return probs;
}

std::vector<Bitstring> sample_camera_shots(const BranchPairState& state, double phi,
                                           int n_shots, std::uint64_t seed) {
  validate(state);
  require_ghz_branches(state, "sample_camera_shots");
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");

  const int n = state.n;
  const WeightClassLaw law = rotated_class_law(state, phi);
  std::vector<double> class_cdf(static_cast<std::size_t>(n) + 1);
  double cum = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double per_string = law.per_string(k);
    if (per_string < -kTol) throw std::logic_error("sample_camera_shots: negative probability");
    cum += std::max(per_string, 0.0) * binomial_coefficient(n, k);
    class_cdf[static_cast<std::size_t>(k)] = cum;
  }

  std::vector<Bitstring> shots(static_cast<std::size_t>(n_shots));
  for (int shot = 0; shot < n_shots; ++shot) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(shot)));
    const double u = gen.uniform01() * cum;
    const int k = static_cast<int>(
        std::lower_bound(class_cdf.begin(), class_cdf.end(), u) - class_cdf.begin());
    shots[static_cast<std::size_t>(shot)] = random_weight_k_string(n, std::min(k, n), gen);
  }
  return shots;
}

std::vector<Bitstring> measure_populations_direct(const BranchPairState& state, int n_shots,
                                                  std::uint64_t seed) {
  validate(state);
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  const std::uint64_t dim = std::uint64_t{1} << state.n;
  std::vector<Bitstring> shots(static_cast<std::size_t>(n_shots));
  for (int shot = 0; shot < n_shots; ++shot) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(shot)));
    const double u = gen.uniform01();
    if (u < state.p_a) {
      shots[static_cast<std::size_t>(shot)] = state.branch_a;
    } else if (u < state.p_a + state.p_b) {
      shots[static_cast<std::size_t>(shot)] = state.branch_b;
    } else {
      if (dim <= 2) throw std::logic_error("leak population with no non-branch strings");
      Bitstring s;
      do {
        s = static_cast<Bitstring>(gen.below(dim));
      } while (s == state.branch_a || s == state.branch_b);
      shots[static_cast<std::size_t>(shot)] = s;
    }
  }
  return shots;
}

std::vector<std::int8_t> sample_parity_outcomes(const BranchPairState& state, double phi,
                                                int n_shots, std::uint64_t seed) {
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  const double p_even = 0.5 * (1.0 + parity_expectation(state, phi));
  std::vector<std::int8_t> outcomes(static_cast<std::size_t>(n_shots));
  for (int shot = 0; shot < n_shots; ++shot) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(shot)));
    outcomes[static_cast<std::size_t>(shot)] = gen.uniform01() < p_even ? std::int8_t{1}
                                                                        : std::int8_t{-1};
  }
  return outcomes;
}

std::vector<PmtShot> sample_pmt_counts(const std::vector<double>& bright_probabilities,
                                       double lambda_ion, double lambda_bg, int n_shots,
                                       std::uint64_t seed) {
  if (!(lambda_ion > 0.0) || lambda_bg < 0.0) {
    throw std::invalid_argument("sample_pmt_counts: lambda_ion > 0 and lambda_bg >= 0 required");
  }
  if (n_shots < 1) throw std::invalid_argument("n_shots must be >= 1");
  double total = 0.0;
  for (double p : bright_probabilities) {
    if (p < -kTol) throw std::invalid_argument("negative bright probability");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("bright probabilities must sum to 1");
  }

  std::vector<double> cdf(bright_probabilities.size());
  double cum = 0.0;
  for (std::size_t k = 0; k < bright_probabilities.size(); ++k) {
    cum += std::max(bright_probabilities[k], 0.0);
    cdf[k] = cum;
  }

  std::vector<PmtShot> shots(static_cast<std::size_t>(n_shots));
  for (int shot = 0; shot < n_shots; ++shot) {
    rng::Xoshiro256 gen(rng::derive_stream(seed, static_cast<std::uint64_t>(shot)));
    const double u = gen.uniform01() * cum;
    const auto k = static_cast<std::size_t>(
        std::lower_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
    const double mean =
        static_cast<double>(std::min(k, cdf.size() - 1)) * lambda_ion + lambda_bg;
    shots[static_cast<std::size_t>(shot)].counts = static_cast<int>(gen.poisson(mean));
  }
  return shots;
}

std::vector<double> bright_count_distribution(const BranchPairState& state) {
  validate(state);
  const int n = state.n;
  std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
  q[static_cast<std::size_t>(bit_weight(state.branch_a))] += state.p_a;
  q[static_cast<std::size_t>(bit_weight(state.branch_b))] += state.p_b;
  if (state.p_leak > 0.0) {
    const double dim = std::ldexp(1.0, n);
    const double per_string = state.p_leak / (dim - 2.0);
    for (int k = 0; k <= n; ++k) {
      q[static_cast<std::size_t>(k)] += per_string * binomial_coefficient(n, k);
    }
    q[static_cast<std::size_t>(bit_weight(state.branch_a))] -= per_string;
    q[static_cast<std::size_t>(bit_weight(state.branch_b))] -= per_string;
  }
  return q;
}

std::vector<double> rotated_bright_count_distribution(const BranchPairState& state, double phi) {
  validate(state);
  if (!branches_complementary(state)) {
    throw UnsupportedConfiguration(
        "rotated_bright_count_distribution: branches must be complementary");
  }
  const int n = state.n;
  const double dim = std::ldexp(1.0, n);
  const WeightClassLaw law = rotated_class_law(state, phi);
  std::vector<double> q(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) {
    // Every diagonal projector rotates to the uniform string distribution
    // (|<s|R|s'>|^2 = 2^{-n}), so the leak block contributes an exact
    // binomial background.
    const double per_string = std::max(law.per_string(k), 0.0) + state.p_leak / dim;
    q[static_cast<std::size_t>(k)] = per_string * binomial_coefficient(n, k);
  }
  double total = 0.0;
  for (double v : q) total += v;
  for (double& v : q) v /= total;
  return q;
}

Estimate parity_from_shots(std::span<const Bitstring> shots) {
  if (shots.empty()) throw std::invalid_argument("parity_from_shots: empty input");
  double sum = 0.0;
  for (Bitstring s : shots) sum += parity_sign(s);
  const double m = sum / static_cast<double>(shots.size());
  const double se = std::sqrt(std::max(1.0 - m * m, 0.0) / static_cast<double>(shots.size()));
  return Estimate{m, se, static_cast<std::int64_t>(shots.size())};
}

Estimate parity_from_outcomes(std::span<const std::int8_t> outcomes) {
  if (outcomes.empty()) throw std::invalid_argument("parity_from_outcomes: empty input");
  double sum = 0.0;
  for (std::int8_t v : outcomes) sum += v;
  const double m = sum / static_cast<double>(outcomes.size());
  const double se = std::sqrt(std::max(1.0 - m * m, 0.0) / static_cast<double>(outcomes.size()));
  return Estimate{m, se, static_cast<std::int64_t>(outcomes.size())};
}

void write_camera_csv(std::ostream& out, const ParityDataset& dataset) {
  out << "setting_phi_rad, shot_index, bitstring\n";
  char buffer[64];
  for (const auto& entry : dataset.entries) {
    std::snprintf(buffer, sizeof(buffer), "%.17g", entry.phi);
    for (std::size_t i = 0; i < entry.shots.size(); ++i) {
      out << buffer << ", " << i << ", " << bits_to_string(entry.shots[i], dataset.n) << "\n";
    }
  }
}

void write_pmt_csv(std::ostream& out,
                   const std::vector<std::vector<PmtShot>>& shots_per_setting) {
  out << "setting_id, shot_index, counts\n";
  for (std::size_t setting = 0; setting < shots_per_setting.size(); ++setting) {
    const auto& shots = shots_per_setting[setting];
    for (std::size_t i = 0; i < shots.size(); ++i) {
      out << setting << ", " << i << ", " << shots[i].counts << "\n";
    }
  }
}

}  // namespace ghzsim
