#include "oracles.hpp"

#include <cmath>

namespace ghzsim::oracles {

namespace {

double simpson(const std::function<double(double)>& f, double a, double fa, double b, double fb,
               double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive(const std::function<double(double)>& f, double a, double fa, double b, double fb,
                double fm, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson(f, a, fa, m, fm, flm);
  const double right = simpson(f, m, fm, b, fb, frm);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) {
    return left + right + (left + right - whole) / 15.0;
  }
  return adaptive(f, a, fa, m, fm, flm, left, tol / 2.0, depth - 1) +
         adaptive(f, m, fm, b, fb, frm, right, tol / 2.0, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = simpson(f, a, fa, b, fb, fm);
  return adaptive(f, a, fa, b, fb, fm, whole, tol, 60);
}

double phase_variance_quadrature(const NoiseParams& params, double t, double tol) {
  if (t == 0.0) return 0.0;
  const auto integrand = [&](double tau) {
    return (t - tau) * params.sigma2 * std::exp(-params.gamma * tau);
  };
  return 2.0 * integrate(integrand, 0.0, t, tol * std::max(t, 1.0));
}

Matrix embed_single_qubit(const Eigen::Matrix2cd& op, int qubit, int n) {
  Matrix out = Matrix::Identity(1, 1);
  for (int j = 0; j < n; ++j) {
    const Eigen::MatrixXcd& factor =
        (j == qubit) ? static_cast<const Eigen::MatrixXcd&>(op)
                     : static_cast<const Eigen::MatrixXcd&>(Eigen::Matrix2cd::Identity());
    Matrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
    for (int r = 0; r < out.rows(); ++r) {
      for (int c = 0; c < out.cols(); ++c) {
        next.block(r * factor.rows(), c * factor.cols(), factor.rows(), factor.cols()) =
            out(r, c) * factor;
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

Eigen::Matrix2cd sigma_phi(double phi_g) {
  Eigen::Matrix2cd m;
  const std::complex<double> i{0.0, 1.0};
  m << 0.0, std::exp(-i * phi_g), std::exp(i * phi_g), 0.0;
  return m;
}

}  // namespace

Matrix ms_generator(int n, double phi_g) {
  const auto dim = std::int64_t{1} << n;
  Matrix g = Matrix::Zero(dim, dim);
  const Eigen::Matrix2cd s = sigma_phi(phi_g);
  for (int j = 0; j < n; ++j) {
    const Matrix sj = embed_single_qubit(s, j, n);
    for (int k = j + 1; k < n; ++k) {
      g += sj * embed_single_qubit(s, k, n);
    }
  }
  return g;
}

Matrix ms_unitary_dense(int n, double theta, double phi_g) {
  const Matrix g = ms_generator(n, phi_g);
  Eigen::SelfAdjointEigenSolver<Matrix> solver(g);
  const auto& values = solver.eigenvalues();
  const Matrix& vectors = solver.eigenvectors();
  Vector phases(values.size());
  const std::complex<double> i{0.0, 1.0};
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    phases(k) = std::exp(-i * (theta / 2.0) * values(k));
  }
  return vectors * phases.asDiagonal() * vectors.adjoint();
}

Matrix collective_rotation_dense(int n, double phi) {
  const std::complex<double> i{0.0, 1.0};
  const Eigen::Matrix2cd r =
      (Eigen::Matrix2cd::Identity() + i * sigma_phi(phi)) / std::sqrt(2.0);
  Matrix out = Matrix::Identity(1, 1);
  for (int j = 0; j < n; ++j) {
    Matrix next(out.rows() * 2, out.cols() * 2);
    for (int a = 0; a < out.rows(); ++a) {
      for (int b = 0; b < out.cols(); ++b) {
        next.block(a * 2, b * 2, 2, 2) = out(a, b) * r;
      }
    }
    out = std::move(next);
  }
  return out;
}

Matrix collective_z_dense(int n, double phi) {
  const auto dim = std::int64_t{1} << n;
  Matrix out = Matrix::Zero(dim, dim);
  const std::complex<double> i{0.0, 1.0};
  for (std::int64_t s = 0; s < dim; ++s) {
    const int k = bit_weight(static_cast<Bitstring>(s));
    out(s, s) = std::exp(-i * (phi / 2.0) * static_cast<double>(n - 2 * k));
  }
  return out;
}

Vector to_eigen(const StateVector& state) {
  Vector v(static_cast<Eigen::Index>(state.dim()));
  for (std::size_t s = 0; s < state.dim(); ++s) {
    v(static_cast<Eigen::Index>(s)) = state.amplitude(static_cast<Bitstring>(s));
  }
  return v;
}

Matrix density_from_branch_pair(const BranchPairState& state) {
  const auto dim = std::int64_t{1} << state.n;
  Matrix rho = Matrix::Zero(dim, dim);
  rho(state.branch_a, state.branch_a) = state.p_a;
  rho(state.branch_b, state.branch_b) = state.p_b;
  rho(state.branch_a, state.branch_b) = state.coherence;
  rho(state.branch_b, state.branch_a) = std::conj(state.coherence);
  if (state.p_leak > 0.0) {
    const double per_string = state.p_leak / static_cast<double>(dim - 2);
    for (std::int64_t s = 0; s < dim; ++s) {
      if (s == state.branch_a || s == state.branch_b) continue;
      rho(s, s) += per_string;
    }
  }
  return rho;
}

Matrix apply_unitary(const Matrix& rho, const Matrix& u) { return u * rho * u.adjoint(); }

Matrix apply_amplitude_damping_dense(const Matrix& rho, int n, double t, double t1) {
  const double survive = std::exp(-t / t1);
  // D (bit 0) decays to S (bit 1): K0 = diag(sqrt(s), 1), K1 = sqrt(1-s)|1><0|.
  Eigen::Matrix2cd k0 = Eigen::Matrix2cd::Zero();
  k0(0, 0) = std::sqrt(survive);
  k0(1, 1) = 1.0;
  Eigen::Matrix2cd k1 = Eigen::Matrix2cd::Zero();
  k1(1, 0) = std::sqrt(1.0 - survive);

  Matrix out = rho;
  for (int j = 0; j < n; ++j) {
    const Matrix e0 = embed_single_qubit(k0, j, n);
    const Matrix e1 = embed_single_qubit(k1, j, n);
    out = e0 * out * e0.adjoint() + e1 * out * e1.adjoint();
  }
  return out;
}

Matrix apply_gaussian_dephasing_dense(const Matrix& rho, int n, double var) {
  const auto dim = std::int64_t{1} << n;
  Matrix out = rho;
  for (std::int64_t s = 0; s < dim; ++s) {
    for (std::int64_t r = 0; r < dim; ++r) {
      const int dk = bit_weight(static_cast<Bitstring>(s)) - bit_weight(static_cast<Bitstring>(r));
      out(s, r) *= std::exp(-0.5 * var * static_cast<double>(dk) * static_cast<double>(dk));
    }
  }
  return out;
}

TrackedElements tracked_elements(const Matrix& rho, const BranchPairState& reference) {
  TrackedElements out;
  out.p_a = rho(reference.branch_a, reference.branch_a).real();
  out.p_b = rho(reference.branch_b, reference.branch_b).real();
  out.coherence = rho(reference.branch_a, reference.branch_b);
  return out;
}

}  // namespace ghzsim::oracles
