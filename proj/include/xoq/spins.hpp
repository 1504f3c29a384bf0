#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <utility>

#include <Eigen/Dense>

// Spin-1/2 algebra on the six-spin Hilbert space of two three-spin qubits.
// Tensor order is fixed as a1 (x) a2 (x) a3 (x) b1 (x) b2 (x) b3 with |up>
// before |down> in each factor, so a1 occupies the most significant bit of
// the 64-dim basis index.  hbar = 1 throughout; Sz eigenvalues are +-1/2.

namespace xoq {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr int kSpinCount = 6;
inline constexpr int kDim = 64;      // 2^6, full space
inline constexpr int kQubitDim = 8;  // 2^3, one three-spin qubit

enum class Qubit { a, b };
enum class Axis { x, y, z };

struct SpinLabel {
  Qubit qubit;
  int index;  // 1, 2 or 3
};

// Canonical tensor-factor position, 0..5.
constexpr int position(SpinLabel s) {
  return (s.qubit == Qubit::b ? 3 : 0) + s.index - 1;
}

constexpr bool operator==(SpinLabel lhs, SpinLabel rhs) {
  return position(lhs) == position(rhs);
}

inline SpinLabel spin_at(int pos) {
  if (pos < 0 || pos >= kSpinCount) {
    throw std::out_of_range("spin position must be 0..5");
  }
  return SpinLabel{pos < 3 ? Qubit::a : Qubit::b, pos % 3 + 1};
}

inline const std::array<SpinLabel, kSpinCount>& all_spins() {
  static const std::array<SpinLabel, kSpinCount> spins = {
      SpinLabel{Qubit::a, 1}, SpinLabel{Qubit::a, 2}, SpinLabel{Qubit::a, 3},
      SpinLabel{Qubit::b, 1}, SpinLabel{Qubit::b, 2}, SpinLabel{Qubit::b, 3}};
  return spins;
}

inline std::string to_string(SpinLabel s) {
  return std::string(s.qubit == Qubit::a ? "a" : "b") + std::to_string(s.index);
}

namespace detail {

inline Matrix spin_half_matrix(Axis axis) {
  const Complex i(0.0, 1.0);
  Matrix s(2, 2);
  switch (axis) {
    case Axis::x: s << 0.0, 0.5, 0.5, 0.0; break;
    case Axis::y: s << 0.0, -0.5 * i, 0.5 * i, 0.0; break;
    case Axis::z: s << 0.5, 0.0, 0.0, -0.5; break;
  }
  return s;
}

// Embed a 2x2 operator on the tensor factor at `pos`, identity elsewhere.
inline Matrix embed_single(const Matrix& local, int pos) {
  Matrix op = Matrix::Zero(kDim, kDim);
  const int shift = kSpinCount - 1 - pos;
  for (int col = 0; col < kDim; ++col) {
    const int b = (col >> shift) & 1;
    for (int r = 0; r < 2; ++r) {
      if (local(r, b) == Complex(0.0)) continue;
      const int row = (col & ~(1 << shift)) | (r << shift);
      op(row, col) += local(r, b);
    }
  }
  return op;
}

inline Vector kron(const Vector& lhs, const Vector& rhs) {
  Vector out(lhs.size() * rhs.size());
  for (Eigen::Index i = 0; i < lhs.size(); ++i) {
    out.segment(i * rhs.size(), rhs.size()) = lhs(i) * rhs;
  }
  return out;
}

}  // namespace detail

// Computational basis ket; bit p of `bits` (counting from the most
// significant of six) is the state of spin p, 0 = up.
inline Vector basis_state(unsigned bits) {
  if (bits >= kDim) throw std::out_of_range("basis index must be < 64");
  Vector v = Vector::Zero(kDim);
  v(bits) = 1.0;
  return v;
}

// S_axis acting on one spin, identity on the other five.
inline Matrix spin_op(SpinLabel label, Axis axis) {
  return detail::embed_single(detail::spin_half_matrix(axis), position(label));
}

// Heisenberg exchange generator S_i . S_j.
inline Matrix exchange_op(SpinLabel i, SpinLabel j) {
  if (i == j) {
    throw std::invalid_argument("exchange_op requires two distinct spins");
  }
  Matrix op = Matrix::Zero(kDim, kDim);
  for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
    op += spin_op(i, axis) * spin_op(j, axis);
  }
  return op;
}

// (S_tot^2, S_tot,z) for all six spins.
inline std::pair<Matrix, Matrix> total_spin_ops() {
  Matrix sz = Matrix::Zero(kDim, kDim);
  for (SpinLabel s : all_spins()) sz += spin_op(s, Axis::z);
  // S^2 = sum_p S_p^2 + 2 sum_{p<q} S_p.S_q, with S_p^2 = 3/4 per spin.
  Matrix s2 = 4.5 * Matrix::Identity(kDim, kDim);
  for (int p = 0; p < kSpinCount; ++p) {
    for (int q = p + 1; q < kSpinCount; ++q) {
      s2 += 2.0 * exchange_op(spin_at(p), spin_at(q));
    }
  }
  return {s2, sz};
}

// The eight three-spin states |1>..|8> on one qubit factor, 8-dim vectors.
// States |1>,|2> hold the pair singlet of spins 1,2; |5>..|8> form the
// spin-3/2 quadruplet.  Valid for either qubit: the vector lives on that
// qubit's three tensor factors.
inline const std::array<Vector, kQubitDim>& single_qubit_states() {
  static const std::array<Vector, kQubitDim> states = [] {
    const double r2 = std::sqrt(2.0);
    const double r3 = std::sqrt(3.0);
    Vector up(2), down(2);
    up << 1.0, 0.0;
    down << 0.0, 1.0;
    Vector s0(4), t0(4), tp(4), tm(4);
    s0 << 0.0, 1.0 / r2, -1.0 / r2, 0.0;
    t0 << 0.0, 1.0 / r2, 1.0 / r2, 0.0;
    tp << 1.0, 0.0, 0.0, 0.0;
    tm << 0.0, 0.0, 0.0, 1.0;
    std::array<Vector, kQubitDim> st;
    st[0] = detail::kron(s0, up);
    st[1] = detail::kron(s0, down);
    st[2] = (r2 * detail::kron(tp, down) - detail::kron(t0, up)) / r3;
    st[3] = (detail::kron(t0, down) - r2 * detail::kron(tm, up)) / r3;
    st[4] = detail::kron(tp, up);
    st[5] = (detail::kron(tp, down) + r2 * detail::kron(t0, up)) / r3;
    st[6] = (r2 * detail::kron(t0, down) + detail::kron(tm, up)) / r3;
    st[7] = detail::kron(tm, down);
    return st;
  }();
  return states;
}

// |ka>|kb> on the full space; ka, kb are 1-based indices into |1>..|8>.
inline Vector product_state(int ka, int kb) {
  if (ka < 1 || ka > kQubitDim || kb < 1 || kb > kQubitDim) {
    throw std::out_of_range("single-qubit state index must be 1..8");
  }
  const auto& st = single_qubit_states();
  return detail::kron(st[ka - 1], st[kb - 1]);
}

enum class Sector {
  s0,  // S = 0, Sz = 0, dim 5
  s1,  // S = 1, Sz = -1, dim 9
};

inline int sector_dim(Sector s) { return s == Sector::s0 ? 5 : 9; }

struct SubspaceBasis {
  Sector sector;
  int dim;
  double total_s;
  double total_sz;
  Matrix vectors;  // kDim x dim, orthonormal columns in the listed order
};

// Total-spin sector bases of the composite system.  The first four vectors
// of the 9-dim basis are the encoded states |00>,|01>,|10>,|11>; the first
// four of the 5-dim basis play the same role in their sector.
inline SubspaceBasis subspace_basis(Sector sector) {
  const auto p = [](int ka, int kb) { return product_state(ka, kb); };
  SubspaceBasis basis;
  basis.sector = sector;
  basis.dim = sector_dim(sector);
  basis.vectors = Matrix(kDim, basis.dim);
  if (sector == Sector::s1) {
    const double h3 = std::sqrt(3.0) / 2.0;
    basis.total_s = 1.0;
    basis.total_sz = -1.0;
    basis.vectors.col(0) = p(2, 2);
    basis.vectors.col(1) = p(2, 4);
    basis.vectors.col(2) = p(4, 2);
    basis.vectors.col(3) = p(4, 4);
    basis.vectors.col(4) = h3 * p(1, 8) - 0.5 * p(2, 7);
    basis.vectors.col(5) = h3 * p(3, 8) - 0.5 * p(4, 7);
    basis.vectors.col(6) = -h3 * p(8, 1) + 0.5 * p(7, 2);
    basis.vectors.col(7) = -h3 * p(8, 3) + 0.5 * p(7, 4);
    basis.vectors.col(8) = 0.5 * std::sqrt(1.2) * (p(6, 8) + p(8, 6)) -
                           std::sqrt(0.4) * p(7, 7);
  } else {
    const double r2 = std::sqrt(2.0);
    basis.total_s = 0.0;
    basis.total_sz = 0.0;
    basis.vectors.col(0) = (p(1, 2) - p(2, 1)) / r2;
    basis.vectors.col(1) = (p(1, 4) - p(2, 3)) / r2;
    basis.vectors.col(2) = (p(3, 2) - p(4, 1)) / r2;
    basis.vectors.col(3) = (p(3, 4) - p(4, 3)) / r2;
    basis.vectors.col(4) =
        0.5 * (p(5, 8) - p(8, 5) + p(7, 6) - p(6, 7));
  }
  return basis;
}

}  // namespace xoq
