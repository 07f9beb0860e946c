#pragma once

// Brute-force pure-state simulator for up to 14 qubits. Serves as the
// preparation path (Molmer-Sorensen interaction) and as the reference
// implementation the compact branch-pair model is validated against.

#include <string_view>
#include <vector>

#include "ghzsim/types.hpp"

namespace ghzsim {

class StateVector {
 public:
  static constexpr int kMaxQubits = 14;

  /// Basis state |bits>, e.g. "00001111" -> amplitude 1 at index 15.
  explicit StateVector(std::string_view bits);
  StateVector(int n, Bitstring basis);

  int num_qubits() const { return n_; }
  std::size_t dim() const { return amps_.size(); }
  complexd amplitude(Bitstring basis) const { return amps_[basis]; }
  const std::vector<complexd>& amplitudes() const { return amps_; }
  double norm() const;

  /// Collective Molmer-Sorensen interaction
  /// exp(-i (theta/2) sum_{j<k} sigma_phi^(j) sigma_phi^(k)),
  /// sigma_phi = sigma_x cos(phi_g) + sigma_y sin(phi_g). Applied exactly via
  /// the collective-spin eigenbasis: rotate every qubit into the sigma_phi
  /// eigenbasis, phase each basis state by its total-spin eigenvalue, rotate
  /// back.
  void apply_ms(double theta, double phi_g);

  /// Per-qubit rotation (I + i sigma_phi)/sqrt(2) on every qubit.
  void apply_collective_rotation(double phi);

  /// |s> -> exp(-i (phi/2) (n - 2 k(s))) |s> with k(s) the number of 1-bits.
  void apply_collective_z_phase(double phi);

  /// |amplitude|^2 for every basis state.
  std::vector<double> outcome_distribution() const;

 private:
  void apply_single_qubit(int qubit, const complexd m[2][2]);

  int n_ = 0;
  std::vector<complexd> amps_;
};

/// Squared overlap with the closest GHZ-class state, maximized over the
/// branch phase, collective z-rotations, and one optional collective pi/2
/// rotation of free phase (needed for odd qubit numbers, where the MS output
/// is a GHZ state in a rotated basis).
double ghz_family_fidelity(const StateVector& state);

}  // namespace ghzsim
