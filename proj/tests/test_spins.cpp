#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "test_support.hpp"
#include "xoq/spins.hpp"

using namespace xoq;
using Catch::Matchers::WithinAbs;

namespace {
const Complex kI(0.0, 1.0);
}

TEST_CASE("spin labels map to canonical tensor positions") {
  CHECK(position(SpinLabel{Qubit::a, 1}) == 0);
  CHECK(position(SpinLabel{Qubit::a, 3}) == 2);
  CHECK(position(SpinLabel{Qubit::b, 1}) == 3);
  CHECK(position(SpinLabel{Qubit::b, 3}) == 5);
  CHECK(to_string(spin_at(4)) == "b2");
  CHECK_THROWS_AS(spin_at(6), std::out_of_range);
}

TEST_CASE("single-spin operators act on their factor only") {
  const Vector all_up = basis_state(0);
  const Vector applied = spin_op(SpinLabel{Qubit::a, 1}, Axis::z) * all_up;
  CHECK((applied - 0.5 * all_up).norm() < 1e-15);

  // su(2) algebra per label
  for (SpinLabel s : all_spins()) {
    const Matrix sx = spin_op(s, Axis::x);
    const Matrix sy = spin_op(s, Axis::y);
    const Matrix sz = spin_op(s, Axis::z);
    CHECK((sx * sy - sy * sx - kI * sz).norm() < 1e-14);
  }

  // operators on distinct labels commute exactly
  const Matrix a2x = spin_op(SpinLabel{Qubit::a, 2}, Axis::x);
  const Matrix b3y = spin_op(SpinLabel{Qubit::b, 3}, Axis::y);
  CHECK(testing::commutator_norm(a2x, b3y) == 0.0);
}

TEST_CASE("exchange operator spectrum and symmetry") {
  const SpinLabel a1{Qubit::a, 1}, a2{Qubit::a, 2};
  const Matrix ex = exchange_op(a1, a2);

  CHECK((ex - exchange_op(a2, a1)).norm() == 0.0);
  CHECK_THROWS_AS(exchange_op(a1, a1), std::invalid_argument);

  Eigen::SelfAdjointEigenSolver<Matrix> solver(ex);
  int n_triplet = 0, n_singlet = 0;
  for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
    const double v = solver.eigenvalues()(k);
    if (std::abs(v - 0.25) < 1e-12) ++n_triplet;
    if (std::abs(v + 0.75) < 1e-12) ++n_singlet;
  }
  CHECK(n_triplet == 48);
  CHECK(n_singlet == 16);

  // expectation against the pair singlet (other spins up):
  // (|up down> - |down up>)/sqrt2 on a1,a2 sits at indices 010000, 100000
  Vector singlet = (basis_state(0b010000) - basis_state(0b100000)) / std::sqrt(2.0);
  const Complex val = singlet.adjoint() * ex * singlet;
  CHECK_THAT(val.real(), WithinAbs(-0.75, 1e-14));
  CHECK_THAT(val.imag(), WithinAbs(0.0, 1e-14));
}

TEST_CASE("total spin operators") {
  const auto [s2, sz] = total_spin_ops();
  const Vector all_down = basis_state(63);

  CHECK((sz * all_down + 3.0 * all_down).norm() < 1e-13);
  CHECK((s2 * all_down - 12.0 * all_down).norm() < 1e-12);

  for (int p = 0; p < kSpinCount; ++p) {
    for (int q = p + 1; q < kSpinCount; ++q) {
      const Matrix ex = exchange_op(spin_at(p), spin_at(q));
      CHECK(testing::commutator_norm(s2, ex) < 1e-12);
      CHECK(testing::commutator_norm(sz, ex) < 1e-12);
    }
  }
}

TEST_CASE("three-spin states match their printed form") {
  const auto& st = single_qubit_states();
  const double r2 = std::sqrt(2.0);

  // |2> = |S0>|down> = (|up down down> - |down up down>)/sqrt2
  Vector expected = Vector::Zero(kQubitDim);
  expected(0b011) = 1.0 / r2;
  expected(0b101) = -1.0 / r2;
  CHECK((st[1] - expected).norm() < 1e-15);

  // |8> = |down down down>
  CHECK_THAT(std::abs(st[7](0b111)), WithinAbs(1.0, 1e-15));

  // orthonormal set
  for (int i = 0; i < kQubitDim; ++i) {
    for (int j = 0; j < kQubitDim; ++j) {
      const Complex g = st[i].adjoint() * st[j];
      CHECK_THAT(std::abs(g - (i == j ? 1.0 : 0.0)), WithinAbs(0.0, 1e-14));
    }
  }
}

TEST_CASE("three-spin states carry the expected total spin") {
  // S^2 of three spins, built locally on the 8-dim factor
  const auto local = [](const Matrix& op, int pos) {
    Matrix out = Matrix::Identity(1, 1);
    for (int p = 0; p < 3; ++p) {
      const Matrix& factor = p == pos ? op : Matrix::Identity(2, 2).eval();
      Matrix next(out.rows() * factor.rows(), out.cols() * factor.cols());
      for (Eigen::Index r = 0; r < out.rows(); ++r) {
        for (Eigen::Index c = 0; c < out.cols(); ++c) {
          next.block(r * factor.rows(), c * factor.cols(), factor.rows(),
                     factor.cols()) = out(r, c) * factor;
        }
      }
      out = next;
    }
    return out;
  };
  Matrix s2 = Matrix::Zero(kQubitDim, kQubitDim);
  for (Axis axis : {Axis::x, Axis::y, Axis::z}) {
    Matrix total = Matrix::Zero(kQubitDim, kQubitDim);
    for (int p = 0; p < 3; ++p) total += local(detail::spin_half_matrix(axis), p);
    s2 += total * total;
  }

  const auto& st = single_qubit_states();
  for (int k = 0; k < kQubitDim; ++k) {
    const Complex v = st[k].adjoint() * s2 * st[k];
    const double expected = k < 4 ? 0.75 : 3.75;  // S=1/2 vs S=3/2
    CHECK_THAT(v.real(), WithinAbs(expected, 1e-12));
  }
}

TEST_CASE("subspace bases are orthonormal eigenbases of the right sector") {
  const auto [s2, sz] = total_spin_ops();
  for (Sector sector : {Sector::s0, Sector::s1}) {
    const SubspaceBasis basis = subspace_basis(sector);
    REQUIRE(basis.dim == (sector == Sector::s0 ? 5 : 9));

    const Matrix gram = basis.vectors.adjoint() * basis.vectors;
    CHECK((gram - Matrix::Identity(basis.dim, basis.dim)).norm() < 1e-12);

    const double s_eig = basis.total_s * (basis.total_s + 1.0);
    CHECK((s2 * basis.vectors - s_eig * basis.vectors).norm() < 1e-12);
    CHECK((sz * basis.vectors - basis.total_sz * basis.vectors).norm() < 1e-12);
  }
}

TEST_CASE("9-dim basis leads with the encoded product states") {
  const SubspaceBasis basis = subspace_basis(Sector::s1);
  CHECK((basis.vectors.col(0) - product_state(2, 2)).norm() == 0.0);
  CHECK((basis.vectors.col(1) - product_state(2, 4)).norm() == 0.0);
  CHECK((basis.vectors.col(2) - product_state(4, 2)).norm() == 0.0);
  CHECK((basis.vectors.col(3) - product_state(4, 4)).norm() == 0.0);
}

TEST_CASE("5-dim basis leads with the antisymmetrized doublet pair") {
  const SubspaceBasis basis = subspace_basis(Sector::s0);
  const Vector expected =
      (product_state(1, 2) - product_state(2, 1)) / std::sqrt(2.0);
  CHECK((basis.vectors.col(0) - expected).norm() < 1e-15);
}

TEST_CASE("exchange operators are block-diagonal over the sectors") {
  for (Sector sector : {Sector::s0, Sector::s1}) {
    const SubspaceBasis basis = subspace_basis(sector);
    const Matrix projector =
        Matrix::Identity(kDim, kDim) - basis.vectors * basis.vectors.adjoint();
    for (int p = 0; p < kSpinCount; ++p) {
      for (int q = p + 1; q < kSpinCount; ++q) {
        const Matrix ex = exchange_op(spin_at(p), spin_at(q));
        const Matrix inside = basis.vectors.adjoint() * ex * basis.vectors;
        CHECK((inside - inside.adjoint()).norm() < 1e-12);
        // no coupling out of the sector
        CHECK((projector * ex * basis.vectors).norm() < 1e-12);
      }
    }
  }
}
