#pragma once

#include <complex>
#include <random>

#include <Eigen/Dense>

#include "xoq/spins.hpp"

// Shared helpers for the test suites.  The brute-force exponential here is
// the independent oracle for the closed-form propagators; keep it free of
// any code path from xoq/dynamics.hpp.

namespace xoq::testing {

// exp(-i * angle * h) by direct eigendecomposition, test-local oracle.
inline Matrix expm_oracle(const Matrix& h, double angle) {
  Eigen::ComplexEigenSolver<Matrix> solver(h);
  const Vector evals = solver.eigenvalues();
  Vector phases(evals.size());
  for (Eigen::Index k = 0; k < evals.size(); ++k) {
    phases(k) = std::exp(Complex(0.0, -angle) * evals(k));
  }
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().inverse();
}

inline Matrix random_unitary(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = Complex(gauss(rng), gauss(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    q.col(c) *= d / std::abs(d);
  }
  return q;
}

inline double unitarity_error(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

inline double commutator_norm(const Matrix& a, const Matrix& b) {
  return (a * b - b * a).norm();
}

}  // namespace xoq::testing
