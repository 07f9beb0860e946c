#include "ghzsim/register_model.hpp"

#include <cmath>
#include <stdexcept>

namespace ghzsim {

namespace {

constexpr double kTol = 1e-12;

Bitstring full_mask(int n) { return (n >= 32) ? ~Bitstring{0} : ((Bitstring{1} << n) - 1); }

}  // namespace

void validate(const BranchPairState& state) {
  if (state.n < 1 || state.n > 32) throw std::invalid_argument("BranchPairState.n out of range");
  const Bitstring mask = full_mask(state.n);
  if ((state.branch_a & ~mask) || (state.branch_b & ~mask)) {
    throw std::invalid_argument("branch labels exceed the register width");
  }
  if (state.branch_a == state.branch_b) {
    throw std::invalid_argument("branches must be distinct");
  }
  if (state.p_a < -kTol || state.p_b < -kTol || state.p_leak < -kTol) {
    throw std::invalid_argument("negative population");
  }
  if (std::abs(state.p_a + state.p_b + state.p_leak - 1.0) > 1e-9) {
    throw std::invalid_argument("populations must sum to 1");
  }
  const double bound = std::sqrt(std::max(state.p_a, 0.0) * std::max(state.p_b, 0.0));
  if (std::abs(state.coherence) > bound + 1e-9) {
    throw std::invalid_argument("coherence exceeds sqrt(p_a p_b)");
  }
}

int dephasing_weight(const BranchPairState& state) {
  return bit_weight(state.branch_b) - bit_weight(state.branch_a);
}

bool branches_complementary(const BranchPairState& state) {
  return (state.branch_a ^ state.branch_b) == full_mask(state.n);
}

BranchPairState ghz_ideal(int n) {
  if (n < 1 || n > 32) throw std::invalid_argument("ghz_ideal: n must be in [1, 32]");
  BranchPairState state;
  state.n = n;
  state.branch_a = 0;
  state.branch_b = full_mask(n);
  state.p_a = state.p_b = 0.5;
  state.coherence = complexd{0.5, 0.0};
  state.p_leak = 0.0;
  return state;
}

BranchPairState dfs_state(int n) {
  if (n < 2 || n > 32 || (n % 2) != 0) {
    throw std::invalid_argument("dfs_state: n must be even and in [2, 32]");
  }
  BranchPairState state;
  state.n = n;
  state.branch_a = full_mask(n / 2);                 // 0^{n/2} 1^{n/2}
  state.branch_b = full_mask(n) ^ state.branch_a;    // 1^{n/2} 0^{n/2}
  state.p_a = state.p_b = 0.5;
  state.coherence = complexd{0.5, 0.0};
  state.p_leak = 0.0;
  return state;
}

BranchPairState branch_pair_with(int n, Bitstring a, Bitstring b, double populations,
                                 double coherence_magnitude) {
  if (populations < 0.0 || populations > 1.0) {
    throw std::invalid_argument("populations must lie in [0, 1]");
  }
  BranchPairState state;
  state.n = n;
  state.branch_a = a;
  state.branch_b = b;
  state.p_a = state.p_b = populations / 2.0;
  state.coherence = complexd{coherence_magnitude / 2.0, 0.0};
  state.p_leak = 1.0 - populations;
  validate(state);
  return state;
}

BranchPairState apply_collective_phase(BranchPairState state, double phi) {
  validate(state);
  const double angle = static_cast<double>(dephasing_weight(state)) * phi;
  state.coherence *= complexd{std::cos(angle), std::sin(angle)};
  return state;
}

BranchPairState apply_gaussian_dephasing(BranchPairState state, const NoiseParams& params,
                                         double t, NoiseKind kind) {
  validate(state);
  const int weight = std::abs(dephasing_weight(state));
  if (weight == 0) return state;
  const double eps = error_probability_kind(weight, params, t, kind);
  state.coherence *= std::exp(-2.0 * eps);
  return state;
}

BranchPairState apply_amplitude_damping(BranchPairState state, double t, double t1) {
  validate(state);
  if (!(t >= 0.0)) throw std::invalid_argument("amplitude damping requires t >= 0");
  if (!(t1 > 0.0)) throw std::invalid_argument("amplitude damping requires t1 > 0");

  const double survive = std::exp(-t / t1);
  const double flip = -std::expm1(-t / t1);  // 1 - survive
  const Bitstring mask = full_mask(state.n);
  const Bitstring dark_a = mask & ~state.branch_a;
  const Bitstring dark_b = mask & ~state.branch_b;
  const int d_a = bit_weight(dark_a);
  const int d_b = bit_weight(dark_b);

  double p_a = state.p_a * std::pow(survive, d_a);
  double p_b = state.p_b * std::pow(survive, d_b);

  // Decay only sets bits, so x can feed y exactly when y covers x's 1-bits;
  // the transfer probability is (1-s) per bit gained and s per dark bit kept.
  if ((state.branch_a & ~state.branch_b) == 0) {
    p_b += state.p_a * std::pow(flip, bit_weight(dark_a & state.branch_b)) *
           std::pow(survive, bit_weight(dark_a & dark_b));
  }
  if ((state.branch_b & ~state.branch_a) == 0) {
    p_a += state.p_b * std::pow(flip, bit_weight(dark_b & state.branch_a)) *
           std::pow(survive, bit_weight(dark_b & dark_a));
  }

  state.coherence *= std::pow(survive, 0.5 * static_cast<double>(d_a + d_b));
  state.p_a = p_a;
  state.p_b = p_b;
  state.p_leak = std::max(1.0 - p_a - p_b, 0.0);
  return state;
}

BranchPairState apply_bit_flips(BranchPairState state, Bitstring mask) {
  validate(state);
  if (mask & ~full_mask(state.n)) throw std::invalid_argument("flip mask exceeds register width");
  state.branch_a ^= mask;
  state.branch_b ^= mask;
  return state;
}

}  // namespace ghzsim
