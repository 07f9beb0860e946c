#pragma once

// Test-only reference implementations, independent of the library's
// computational paths: adaptive quadrature for the phase-variance integral,
// and dense Eigen matrix mechanics (kron-built operators, eigendecomposition
// exponentials, density-matrix channels) for small registers.

#include <Eigen/Dense>

#include <complex>
#include <functional>

#include "ghzsim/noise_kernels.hpp"
#include "ghzsim/register_model.hpp"
#include "ghzsim/statevector.hpp"

namespace ghzsim::oracles {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

/// Adaptive Simpson integration to absolute tolerance `tol`.
double integrate(const std::function<double(double)>& f, double a, double b, double tol);

/// Var[phi(t)] = 2 int_0^t (t - tau) sigma2 exp(-gamma tau) dtau, by quadrature.
double phase_variance_quadrature(const NoiseParams& params, double t, double tol = 1e-13);

/// Operator with `op` acting on `qubit` (0 = leftmost) and identity elsewhere.
Matrix embed_single_qubit(const Eigen::Matrix2cd& op, int qubit, int n);

/// sum_{j<k} sigma_phi^(j) sigma_phi^(k) as a dense matrix.
Matrix ms_generator(int n, double phi_g);

/// exp(-i (theta/2) G) via eigendecomposition of the Hermitian generator.
Matrix ms_unitary_dense(int n, double theta, double phi_g);

/// Per-qubit (I + i sigma_phi)/sqrt(2) on all qubits.
Matrix collective_rotation_dense(int n, double phi);

/// diag(exp(-i (phi/2)(n - 2 k(s)))).
Matrix collective_z_dense(int n, double phi);

Vector to_eigen(const StateVector& state);

/// rho = p_a |a><a| + p_b |b><b| + c |a><b| + c* |b><a| (+ uniform leak).
Matrix density_from_branch_pair(const BranchPairState& state);

Matrix apply_unitary(const Matrix& rho, const Matrix& u);

/// Per-qubit D->S amplitude damping (0-bit decays to 1-bit) with survival
/// exp(-t/t1), composed qubit by qubit from the two Kraus operators.
Matrix apply_amplitude_damping_dense(const Matrix& rho, int n, double t, double t1);

/// Ensemble-averaged collective dephasing with phase variance `var`:
/// rho_{s,s'} *= exp(-var (k(s) - k(s'))^2 / 2).
Matrix apply_gaussian_dephasing_dense(const Matrix& rho, int n, double var);

struct TrackedElements {
  double p_a = 0.0;
  double p_b = 0.0;
  std::complex<double> coherence;  // <a| rho |b>
};
TrackedElements tracked_elements(const Matrix& rho, const BranchPairState& reference);

}  // namespace ghzsim::oracles
