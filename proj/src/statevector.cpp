#include "ghzsim/statevector.hpp"

#include <cmath>
#include <stdexcept>

namespace ghzsim {

namespace {

complexd polar_unit(double angle) { return complexd{std::cos(angle), std::sin(angle)}; }

}  // namespace

StateVector::StateVector(int n, Bitstring basis) : n_(n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("StateVector supports 1..14 qubits");
  }
  amps_.assign(std::size_t{1} << n, complexd{0.0, 0.0});
  if (basis >= amps_.size()) throw std::invalid_argument("basis index out of range");
  amps_[basis] = complexd{1.0, 0.0};
}

StateVector::StateVector(std::string_view bits)
    : StateVector(static_cast<int>(bits.size()), bits_from_string(bits)) {
  if (bits.empty() || bits.size() > kMaxQubits) {
    throw std::invalid_argument("StateVector supports 1..14 qubits");
  }
}

double StateVector::norm() const {
  double total = 0.0;
  for (const auto& a : amps_) total += std::norm(a);
  return std::sqrt(total);
}

void StateVector::apply_single_qubit(int qubit, const complexd m[2][2]) {
  // qubit 0 is the leftmost ket character, i.e. the highest bit.
  const std::size_t stride = std::size_t{1} << (n_ - 1 - qubit);
  const std::size_t dim = amps_.size();
  for (std::size_t base = 0; base < dim; base += 2 * stride) {
    for (std::size_t low = 0; low < stride; ++low) {
      const std::size_t i0 = base + low;
      const std::size_t i1 = i0 + stride;
      const complexd a0 = amps_[i0];
      const complexd a1 = amps_[i1];
      amps_[i0] = m[0][0] * a0 + m[0][1] * a1;
      amps_[i1] = m[1][0] * a0 + m[1][1] * a1;
    }
  }
}

void StateVector::apply_ms(double theta, double phi_g) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const complexd e_plus = polar_unit(phi_g);
  const complexd e_minus = polar_unit(-phi_g);

  // Columns of V map |0>,|1> to the +-1 eigenvectors of sigma_phi.
  const complexd v[2][2] = {{inv_sqrt2, inv_sqrt2}, {inv_sqrt2 * e_plus, -inv_sqrt2 * e_plus}};
  const complexd v_dag[2][2] = {{inv_sqrt2, inv_sqrt2 * e_minus},
                                {inv_sqrt2, -inv_sqrt2 * e_minus}};

  for (int q = 0; q < n_; ++q) apply_single_qubit(q, v_dag);

  // In the eigenbasis the generator is 2 S^2 - n/2 with S = (n - 2k)/2.
  const double global = theta * n_ / 4.0;
  for (std::size_t s = 0; s < amps_.size(); ++s) {
    const double spin = 0.5 * (n_ - 2 * bit_weight(static_cast<Bitstring>(s)));
    amps_[s] *= polar_unit(global - theta * spin * spin);
  }

  for (int q = 0; q < n_; ++q) apply_single_qubit(q, v);
}

void StateVector::apply_collective_rotation(double phi) {
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  const complexd i_unit{0.0, 1.0};
  const complexd r[2][2] = {{inv_sqrt2, i_unit * polar_unit(-phi) * inv_sqrt2},
                            {i_unit * polar_unit(phi) * inv_sqrt2, inv_sqrt2}};
  for (int q = 0; q < n_; ++q) apply_single_qubit(q, r);
}

void StateVector::apply_collective_z_phase(double phi) {
  for (std::size_t s = 0; s < amps_.size(); ++s) {
    const int k = bit_weight(static_cast<Bitstring>(s));
    amps_[s] *= polar_unit(-0.5 * phi * (n_ - 2 * k));
  }
}

std::vector<double> StateVector::outcome_distribution() const {
  std::vector<double> probs(amps_.size());
  for (std::size_t s = 0; s < amps_.size(); ++s) probs[s] = std::norm(amps_[s]);
  return probs;
}

namespace {

// (|a_{0..0}| + |a_{1..1}|)^2 / 2: overlap with the best GHZ state after
// optimizing the relative branch phase (covers collective z-rotations too).
double branch_overlap_fidelity(complexd a_zero, complexd a_ones) {
  const double s = std::abs(a_zero) + std::abs(a_ones);
  return 0.5 * s * s;
}

// Same quantity after the collective pi/2 rotation R(phi_r). Uses the
// weight-resolved amplitude sums B_k = sum_{|s|=k} amp_s, so each phi_r
// evaluation is O(n).
double rotated_fidelity(const std::vector<complexd>& weight_sums, int n, double phi_r) {
  const complexd i_unit{0.0, 1.0};
  complexd a_zero{0.0, 0.0};
  complexd a_ones{0.0, 0.0};
  const complexd w_zero = i_unit * polar_unit(-phi_r);
  const complexd w_ones = i_unit * polar_unit(phi_r);
  complexd pow_zero{1.0, 0.0};
  for (int k = 0; k <= n; ++k) {
    a_zero += weight_sums[k] * pow_zero;
    pow_zero *= w_zero;
  }
  complexd pow_ones{1.0, 0.0};
  for (int k = n; k >= 0; --k) {
    a_ones += weight_sums[k] * pow_ones;
    pow_ones *= w_ones;
  }
  const double scale = std::pow(0.5, 0.5 * n);
  return branch_overlap_fidelity(a_zero * scale, a_ones * scale);
}

}  // namespace

double ghz_family_fidelity(const StateVector& state) {
  const int n = state.num_qubits();
  const Bitstring ones = static_cast<Bitstring>(state.dim() - 1);
  double best = branch_overlap_fidelity(state.amplitude(0), state.amplitude(ones));

  std::vector<complexd> weight_sums(n + 1, complexd{0.0, 0.0});
  for (std::size_t s = 0; s < state.dim(); ++s) {
    weight_sums[bit_weight(static_cast<Bitstring>(s))] += state.amplitude(static_cast<Bitstring>(s));
  }

  // Coarse scan then golden-section refinement; the objective is a smooth
  // trigonometric polynomial, so this pins the maximum far below 1e-9.
  const int grid = 1024;
  double best_phi = 0.0;
  double best_rot = -1.0;
  for (int i = 0; i < grid; ++i) {
    const double phi = 2.0 * M_PI * i / grid;
    const double f = rotated_fidelity(weight_sums, n, phi);
    if (f > best_rot) {
      best_rot = f;
      best_phi = phi;
    }
  }
  double lo = best_phi - 2.0 * M_PI / grid;
  double hi = best_phi + 2.0 * M_PI / grid;
  const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - golden * (hi - lo);
  double x2 = lo + golden * (hi - lo);
  double f1 = rotated_fidelity(weight_sums, n, x1);
  double f2 = rotated_fidelity(weight_sums, n, x2);
  while (hi - lo > 1e-10) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + golden * (hi - lo);
      f2 = rotated_fidelity(weight_sums, n, x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - golden * (hi - lo);
      f1 = rotated_fidelity(weight_sums, n, x1);
    }
  }
  best_rot = std::max(best_rot, std::max(f1, f2));
  return std::max(best, best_rot);
}

}  // namespace ghzsim
