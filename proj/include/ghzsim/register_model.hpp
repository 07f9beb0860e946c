#pragma once

// Compact GHZ-class state: two coherent computational-basis branches, one
// complex coherence, and an unstructured leak bucket for population that
// left the tracked pair. All channels are pure value-to-value maps.

#include <cstdint>

#include "ghzsim/noise_kernels.hpp"
#include "ghzsim/types.hpp"

namespace ghzsim {

struct BranchPairState {
  int n = 0;
  Bitstring branch_a = 0;
  Bitstring branch_b = 0;
  double p_a = 0.0;
  double p_b = 0.0;
  complexd coherence{0.0, 0.0};  ///< <branch_a| rho |branch_b>
  double p_leak = 0.0;
};

/// Throws std::invalid_argument when populations, coherence bound, or the
/// branch labels are inconsistent (tolerance 1e-12 on the equalities).
void validate(const BranchPairState& state);

/// k(branch_b) - k(branch_a): the collective-dephasing weight of the pair.
/// +-n for an n-qubit GHZ state, 0 for any dephasing-free pair.
int dephasing_weight(const BranchPairState& state);

/// True when branch_b is the bitwise complement of branch_a.
bool branches_complementary(const BranchPairState& state);

/// (|0...0> + |1...1>)/sqrt(2).
BranchPairState ghz_ideal(int n);

/// (|0^{n/2} 1^{n/2}> + |1^{n/2} 0^{n/2}>)/sqrt(2); n must be even.
/// Its dephasing weight is zero, so collective phase noise leaves it alone.
BranchPairState dfs_state(int n);

/// Branch-pair state with prescribed total branch population p and real
/// coherence c (p_a = p_b = p/2, leak = 1 - p). Used to model degraded
/// preparations with known P and C = 2c.
BranchPairState branch_pair_with(int n, Bitstring a, Bitstring b, double populations,
                                 double coherence_magnitude);

/// Deterministic collective z-phase: coherence *= exp(i delta_k phi).
BranchPairState apply_collective_phase(BranchPairState state, double phi);

/// Ensemble-averaged Gaussian dephasing over [0, t]:
/// coherence *= exp(-2 eps(|delta_k|, params, t)). One-shot channel from the
/// preparation time; do not chain segments for the correlated kernel, the
/// Gaussian average does not factorize over subintervals.
BranchPairState apply_gaussian_dephasing(BranchPairState state, const NoiseParams& params,
                                         double t, NoiseKind kind = NoiseKind::ornstein_uhlenbeck);

/// Independent per-qubit decay of the metastable D state (bit 0) toward the
/// S state (bit 1) with survival s = exp(-t/t1). Branch populations scale by
/// s^{d_x} (d_x = number of 0-bits); population decaying from one branch
/// exactly onto the other is credited there, everything else lands in the
/// leak bucket. The coherence scales by s^{(d_a+d_b)/2}.
BranchPairState apply_amplitude_damping(BranchPairState state, double t, double t1);

/// Local bit flips (X on the masked qubits): relabels both branches, leaves
/// populations and coherence untouched. Used to rotate a dephasing-free pair
/// into GHZ form at readout time.
BranchPairState apply_bit_flips(BranchPairState state, Bitstring mask);

}  // namespace ghzsim
