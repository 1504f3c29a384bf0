#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "xoq/dynamics.hpp"
#include "xoq/spins.hpp"

// Gate-quality metrics: CNOT objective functions over the sector
// transformation matrices, encoded-block extraction with a scalar leakage,
// Makhlin local invariants and CSV heatmap export of modulus/phase grids.
//
// The encoded states are the first four basis vectors of each sector, in
// which CNOT reads as (1,1),(2,2),(3,4),(4,3); the objectives sum exactly
// those entries, so each one is invariant under a global sector phase.

namespace xoq {

inline Eigen::Matrix4cd cnot_matrix() {
  Eigen::Matrix4cd c = Eigen::Matrix4cd::Zero();
  c(0, 0) = 1.0;
  c(1, 1) = 1.0;
  c(2, 3) = 1.0;
  c(3, 2) = 1.0;
  return c;
}

namespace detail {

inline Complex encoded_trace(const Matrix& u) {
  return u(0, 0) + u(1, 1) + u(2, 3) + u(3, 2);
}

inline void require_dim(const Matrix& u, int dim, const char* what) {
  if (u.rows() != dim || u.cols() != dim) {
    throw std::invalid_argument(std::string(what) + " must be " +
                                std::to_string(dim) + "x" + std::to_string(dim));
  }
}

}  // namespace detail

// Fixed-step objective on the 9-dim sector:
//   f = sqrt(1 - |U(1,1) + U(2,2) + U(3,4) + U(4,3)| / 4).
// Zero exactly when the encoded block is CNOT times a common phase.
inline double objective_f9(const Matrix& u9) {
  detail::require_dim(u9, 9, "U9");
  const double overlap = std::abs(detail::encoded_trace(u9)) / 4.0;
  return std::sqrt(std::max(0.0, 1.0 - overlap));
}

// Joint objective over both sectors:
//   f = sqrt(2 - |sum_5|/4 - |sum_9|/4),   range [0, sqrt(2)].
inline double objective_f_joint(const Matrix& u5, const Matrix& u9) {
  detail::require_dim(u5, 5, "U5");
  detail::require_dim(u9, 9, "U9");
  const double overlap5 = std::abs(detail::encoded_trace(u5)) / 4.0;
  const double overlap9 = std::abs(detail::encoded_trace(u9)) / 4.0;
  return std::sqrt(std::max(0.0, 2.0 - overlap5 - overlap9));
}

inline double objective_f9(const TransformationMatrix& u9) {
  return objective_f9(u9.entries);
}
inline double objective_f_joint(const TransformationMatrix& u5,
                                const TransformationMatrix& u9) {
  return objective_f_joint(u5.entries, u9.entries);
}

struct EncodedBlock {
  Eigen::Matrix4cd block;
  double leakage;  // Frobenius norm of the encoded<->leaked coupling blocks
};

// Upper-left 4x4 block of a sector matrix plus the leakage scalar.
inline EncodedBlock encoded_block(const Matrix& u) {
  if (u.rows() != u.cols() || u.rows() < 5) {
    throw std::invalid_argument("sector matrix must be square with dim >= 5");
  }
  const Eigen::Index n = u.rows();
  EncodedBlock out;
  out.block = u.topLeftCorner(4, 4);
  const double cross = u.topRightCorner(4, n - 4).squaredNorm() +
                       u.bottomLeftCorner(n - 4, 4).squaredNorm();
  out.leakage = std::sqrt(cross);
  return out;
}

inline EncodedBlock encoded_block(const TransformationMatrix& u) {
  return encoded_block(u.entries);
}

struct MakhlinInvariants {
  Complex g1;
  double g2;
};

// Local invariants (g1, g2) of a two-qubit unitary, computed in the magic
// (Bell) basis: m = V_B^T V_B, g1 = tr(m)^2 / (16 det V),
// g2 = (tr(m)^2 - tr(m^2)) / (4 det V).
inline MakhlinInvariants makhlin_invariants(const Eigen::Matrix4cd& v) {
  const double nonunitarity =
      (v.adjoint() * v - Eigen::Matrix4cd::Identity()).norm();
  if (nonunitarity > 1e-10) {
    throw std::invalid_argument("makhlin_invariants requires a unitary input");
  }
  const Complex i(0.0, 1.0);
  const double r2 = std::sqrt(0.5);
  Eigen::Matrix4cd q;
  q << 1.0, 0.0, 0.0, i,
       0.0, i, 1.0, 0.0,
       0.0, i, -1.0, 0.0,
       1.0, 0.0, 0.0, -i;
  q *= r2;
  const Eigen::Matrix4cd vb = q.adjoint() * v * q;
  const Eigen::Matrix4cd m = vb.transpose() * vb;
  const Complex tr = m.trace();
  const Complex tr2 = (m * m).trace();
  const Complex det = v.determinant();
  const Complex g2 = (tr * tr - tr2) / (4.0 * det);
  return {tr * tr / (16.0 * det), g2.real()};
}

// Closest unitary to a near-unitary block (polar factor via SVD).  Useful
// before computing Makhlin invariants of an extracted encoded block, which
// carries a small leakage-induced deviation from unitarity.
inline Eigen::Matrix4cd closest_unitary(const Eigen::Matrix4cd& v) {
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(
      v, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

struct ObjectiveReport {
  double f9;
  double f_joint;
  double leakage;    // sqrt(leak5^2 + leak9^2)
  double leakage5;
  double leakage9;
  Complex phase5;    // unit-modulus phase of the encoded block vs CNOT
  Complex phase9;
  double phase_mismatch;  // |arg(phase5 / phase9)|
};

// The paper-facing summary of a simulated sequence.  The printed objective
// does not constrain the two sector phases against each other; the report
// surfaces their mismatch so a strict check remains available.
inline ObjectiveReport evaluate_objectives(const Matrix& u5, const Matrix& u9) {
  detail::require_dim(u5, 5, "U5");
  detail::require_dim(u9, 9, "U9");
  ObjectiveReport r;
  r.f9 = objective_f9(u9);
  r.f_joint = objective_f_joint(u5, u9);
  r.leakage5 = encoded_block(u5).leakage;
  r.leakage9 = encoded_block(u9).leakage;
  r.leakage = std::hypot(r.leakage5, r.leakage9);
  const auto phase = [](const Matrix& u) {
    const Complex z = detail::encoded_trace(u);
    return std::abs(z) > 0.0 ? z / std::abs(z) : Complex(1.0, 0.0);
  };
  r.phase5 = phase(u5);
  r.phase9 = phase(u9);
  r.phase_mismatch = std::abs(std::arg(r.phase5 / r.phase9));
  return r;
}

inline ObjectiveReport evaluate_objectives(const TransformationMatrix& u5,
                                           const TransformationMatrix& u9) {
  return evaluate_objectives(u5.entries, u9.entries);
}

// CSV heatmap of a sector matrix: one line per entry with modulus and phase,
// phases in (-pi, pi].
inline void export_matrix_heatmap(const Matrix& u, std::ostream& out) {
  out << "row,col,modulus,phase_radians\n";
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    for (Eigen::Index c = 0; c < u.cols(); ++c) {
      double phase = std::arg(u(r, c));
      if (phase <= -std::numbers::pi) phase = std::numbers::pi;
      out << (r + 1) << ',' << (c + 1) << ',' << std::abs(u(r, c)) << ','
          << phase << '\n';
    }
  }
}

inline void export_matrix_heatmap(const Matrix& u, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open \"" + path + "\" for writing");
  export_matrix_heatmap(u, out);
  if (!out.good()) throw std::runtime_error("write to \"" + path + "\" failed");
}

struct HeatmapEntry {
  int row, col;
  double modulus, phase;
};

// Parse the CSV heatmap format back; used by round-trip checks.
inline std::vector<HeatmapEntry> parse_matrix_heatmap(std::istream& in) {
  std::vector<HeatmapEntry> entries;
  std::string line;
  if (!std::getline(in, line) || line != "row,col,modulus,phase_radians") {
    throw std::runtime_error("bad heatmap header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    HeatmapEntry e;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &e.row, &e.col, &e.modulus,
                    &e.phase) != 4) {
      throw std::runtime_error("bad heatmap line: " + line);
    }
    entries.push_back(e);
  }
  return entries;
}

}  // namespace xoq
