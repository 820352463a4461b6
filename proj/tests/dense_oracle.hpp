// Test-only dense oracles: build Pauli strings and Heisenberg evolution as
// explicit 2^n x 2^n complex matrices, independently of the production
// bit-mask implementation.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <unsupported/Eigen/MatrixFunctions>

#include "opgrowth/exact.hpp"
#include "opgrowth/pauli.hpp"

namespace oracle {

using Eigen::MatrixXcd;
using cd = std::complex<double>;

inline MatrixXcd single_pauli(opgrowth::Pauli p) {
  MatrixXcd m(2, 2);
  switch (p) {
    case opgrowth::Pauli::I: m << 1, 0, 0, 1; break;
    case opgrowth::Pauli::X: m << 0, 1, 1, 0; break;
    case opgrowth::Pauli::Y: m << 0, cd(0, -1), cd(0, 1), 0; break;
    case opgrowth::Pauli::Z: m << 1, 0, 0, -1; break;
  }
  return m;
}

inline MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
  MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Site 0 is the leftmost (most significant) tensor factor.
inline MatrixXcd pauli_matrix(const opgrowth::PauliString& s) {
  MatrixXcd m = single_pauli(s.site(0));
  for (int i = 1; i < s.n(); ++i) m = kron(m, single_pauli(s.site(i)));
  return m;
}

inline MatrixXcd hamiltonian_matrix(const opgrowth::HamiltonianSpec& h) {
  const int64_t dim = int64_t(1) << h.n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (const auto& [p, g] : h.terms) m += g * pauli_matrix(p);
  return m;
}

inline MatrixXcd state_matrix(const opgrowth::OperatorState& st) {
  const int64_t dim = int64_t(1) << st.n;
  MatrixXcd m = MatrixXcd::Zero(dim, dim);
  for (int64_t idx = 0; idx < st.coeffs.size(); ++idx) {
    if (st.coeffs[idx] == 0.0) continue;
    m += st.coeffs[idx] *
         pauli_matrix(opgrowth::pauli_from_index(st.n, static_cast<uint32_t>(idx)));
  }
  return m;
}

/// Coefficients tr(R M) / 2^n in the normalized Pauli basis.
inline Eigen::VectorXd coefficients(int n, const MatrixXcd& m,
                                    double imag_tol = 1e-9) {
  const int64_t dim = int64_t(1) << n;
  Eigen::VectorXd c(int64_t(1) << (2 * n));
  for (int64_t idx = 0; idx < c.size(); ++idx) {
    cd tr = (pauli_matrix(opgrowth::pauli_from_index(n, static_cast<uint32_t>(idx))) * m)
                .trace() / double(dim);
    if (std::abs(tr.imag()) > imag_tol)
      throw std::runtime_error("oracle: non-real Pauli coefficient");
    c[idx] = tr.real();
  }
  return c;
}

/// Heisenberg conjugation M(t) = e^{iHt} M e^{-iHt}.
inline MatrixXcd heisenberg(const MatrixXcd& h, const MatrixXcd& m, double t) {
  MatrixXcd u = (cd(0, 1) * t * h).exp();
  return u * m * u.adjoint();
}

/// Fixed-step RK4 integration of
/// dM/dt = i[H, M] + sum_a rate_a (L_a M L_a - M) for Pauli jumps L_a.
inline MatrixXcd lindblad_heisenberg(
    const MatrixXcd& h, const std::vector<std::pair<MatrixXcd, double>>& jumps,
    MatrixXcd m, double t, int steps) {
  auto rhs = [&](const MatrixXcd& x) {
    MatrixXcd d = cd(0, 1) * (h * x - x * h);
    for (const auto& [l, rate] : jumps) d += rate * (l * x * l - x);
    return d;
  };
  double dt = t / steps;
  for (int k = 0; k < steps; ++k) {
    MatrixXcd k1 = rhs(m);
    MatrixXcd k2 = rhs(m + 0.5 * dt * k1);
    MatrixXcd k3 = rhs(m + 0.5 * dt * k2);
    MatrixXcd k4 = rhs(m + dt * k3);
    m += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return m;
}

}  // namespace oracle
