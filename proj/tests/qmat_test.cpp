// Copyright 2026 The eurqsi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "eurqsi/qmat.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace eurqsi;
using namespace eurqsi::testing;

TEST(Tensor, IdentityTimesIdentity) {
  EXPECT_EQ(max_abs(tensor(identity(2), identity(2)) - identity(4)), 0.0);
}

TEST(Tensor, SubsystemZeroIsSlowest) {
  // |0><0| (x) |1><1| is |01><01|, flat index 1
  EXPECT_EQ(max_abs(tensor(diag({1, 0}), diag({0, 1})) - diag({0, 1, 0, 0})), 0.0);
}

TEST(Tensor, TraceIsMultiplicative) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const CMatrix a = gaussian_matrix(2, 2, rng);
    const CMatrix b = gaussian_matrix(2, 2, rng);
    const Complex expected = a.trace() * b.trace();
    EXPECT_NEAR(std::abs(tensor(a, b).trace() - expected), 0.0, 1e-12);
  }
}

TEST(PartialTrace, ProductState) {
  std::mt19937_64 rng(3);
  const CMatrix rho = random_state(2, 2, 11).matrix();
  const CMatrix sigma = 2.5 * random_state(2, 2, 12).matrix();
  const CMatrix reduced = partial_trace(tensor(rho, sigma), {2, 2}, {1});
  EXPECT_LT(max_abs(reduced - real_trace(rho) * sigma), 1e-14);
  const CMatrix reduced0 = partial_trace(tensor(rho, sigma), {2, 2}, {0});
  EXPECT_LT(max_abs(reduced0 - real_trace(sigma) * rho), 1e-14);
}

TEST(PartialTrace, BellStateReducesToMaximallyMixed) {
  const CMatrix phi = projector(bell_phi());
  EXPECT_LT(max_abs(partial_trace(phi, {2, 2}, {1}) - mixed(2)), 1e-15);
  EXPECT_LT(max_abs(partial_trace(phi, {2, 2}, {0}) - mixed(2)), 1e-15);
}

// Index-loop oracle for a three-qubit state, independent of the
// lookup-table implementation.
static CMatrix trace_out_middle(const CMatrix& m) {
  CMatrix out = CMatrix::Zero(4, 4);
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int c2 = 0; c2 < 2; ++c2)
          for (int b = 0; b < 2; ++b)
            out(a * 2 + c, a2 * 2 + c2) += m(a * 4 + b * 2 + c, a2 * 4 + b * 2 + c2);
  return out;
}

TEST(PartialTrace, ThreeQubitsAgainstIndexLoops) {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const CMatrix rho = random_state(Dims{2, 2, 2}, 1 + seed % 8, seed).matrix();
    const CMatrix reduced = partial_trace(rho, {2, 2, 2}, {0, 2});
    EXPECT_LT(max_abs(reduced - trace_out_middle(rho)), 1e-14);
    EXPECT_NEAR(real_trace(reduced), real_trace(rho), 1e-12);
    EXPECT_NEAR(real_trace(partial_trace(rho, {2, 2, 2}, {1})), 1.0, 1e-12);
  }
}

TEST(PartialTrace, PreservesPositivity) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const CMatrix rho = random_state(Dims{2, 3, 2}, 1 + seed % 12, 100 + seed).matrix();
    for (std::vector<std::size_t> keep :
         {std::vector<std::size_t>{0}, {1}, {2}, {0, 1}, {1, 2}, {0, 2}}) {
      const HermEig eig = herm_eig(partial_trace(rho, {2, 3, 2}, keep));
      EXPECT_GE(eig.min_value(), -1e-14);
    }
  }
}

TEST(PartialTrace, DimensionMismatchThrows) {
  EXPECT_THROW(partial_trace(identity(4), {2, 3}, {0}), DimensionError);
  EXPECT_THROW(partial_trace(identity(4), {2, 2}, {2}), DimensionError);
  EXPECT_THROW(partial_trace(CMatrix::Zero(4, 2), {2, 2}, {0}), DimensionError);
}

TEST(PermuteSubsystems, SwapsFactors) {
  const CMatrix a = random_state(2, 2, 1).matrix();
  const CMatrix b = random_state(3, 3, 2).matrix();
  EXPECT_LT(max_abs(permute_subsystems(tensor(a, b), {2, 3}, {1, 0}) - tensor(b, a)), 1e-15);
}

TEST(HermEig, ReconstructionAndUnitarity) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 16);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto d = static_cast<std::size_t>(dim(rng));
    const CMatrix m = random_hermitian(d, rng);
    const HermEig eig = herm_eig(m);
    EXPECT_LE(max_abs(eig.reconstruct() - m), 1e-10 * max_abs(m));
    EXPECT_LE(max_abs(eig.vectors.adjoint() * eig.vectors - identity(d)), 1e-10);
    for (Eigen::Index k = 1; k < eig.values.size(); ++k) {
      EXPECT_GE(eig.values(k - 1), eig.values(k));
    }
  }
}

TEST(MatPower, ScalarMatrixSquareRoot) {
  EXPECT_LT(max_abs(mat_power_on_support(mixed(2), 0.5) - identity(2) / std::sqrt(2.0)), 1e-15);
}

TEST(MatPower, InverseSquareRootOnSupport) {
  EXPECT_LT(max_abs(mat_power_on_support(diag({1, 0}), -0.5) - diag({1, 0})), 1e-15);
}

TEST(MatPower, ComplexExponentMatchesScalarPowers) {
  const Complex z(-0.5, 0.25);
  CMatrix expected = CMatrix::Zero(3, 3);
  expected(0, 0) = std::pow(Complex(0.7), z);
  expected(1, 1) = std::pow(Complex(0.3), z);
  EXPECT_LT(max_abs(mat_power_on_support(diag({0.7, 0.3, 0.0}), z) - expected), 1e-14);
}

TEST(MatPower, RotatedBasisMatchesScalarPowers) {
  std::mt19937_64 rng(5);
  const CMatrix u = random_unitary(3, rng);
  const Complex z(-0.5, 0.25);
  CMatrix d = CMatrix::Zero(3, 3);
  d(0, 0) = std::pow(Complex(0.7), z);
  d(1, 1) = std::pow(Complex(0.3), z);
  const CMatrix m = u * diag({0.7, 0.3, 0.0}) * u.adjoint();
  EXPECT_LT(max_abs(mat_power_on_support(m, z) - u * d * u.adjoint()), 1e-12);
}

TEST(MatPower, PowerLaws) {
  std::mt19937_64 rng(9);
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const std::size_t d = 2 + seed % 4;
    const CMatrix m = random_state(d, 1 + seed % d, seed).matrix();
    const CMatrix proj = support_projector(m);
    EXPECT_LT(max_abs(mat_power_on_support(m, 1.0) - m), 1e-9);
    const Complex a(0.3, -0.7), b(-0.4, 1.1);
    const CMatrix lhs = mat_power_on_support(m, a) * mat_power_on_support(m, b);
    EXPECT_LT(max_abs(proj * (lhs - mat_power_on_support(m, a + b)) * proj), 1e-9);
  }
}

TEST(MatPower, RejectsInvalidInput) {
  CMatrix nh(2, 2);
  nh << 1, 1, 0, 1;
  EXPECT_THROW(mat_power_on_support(nh, 0.5), InvariantError);
  EXPECT_THROW(mat_power_on_support(diag({1, -0.1}), 0.5), InvariantError);
}

TEST(Fidelity, IdenticalStates) {
  const CMatrix rho = random_state(3, 2, 4).matrix();
  EXPECT_NEAR(fidelity(rho, rho), 1.0, 1e-10);
}

TEST(Fidelity, OrthogonalPureStates) {
  EXPECT_EQ(fidelity(diag({1, 0}), diag({0, 1})), 0.0);
}

TEST(Fidelity, PureStatesAndSymmetry) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t d = 2 + trial % 4;
    CVector psi = gaussian_matrix(d, 1, rng).col(0);
    CVector phi = gaussian_matrix(d, 1, rng).col(0);
    psi.normalize();
    phi.normalize();
    const double overlap = std::norm(psi.dot(phi));
    EXPECT_NEAR(fidelity(projector(psi), projector(phi)), overlap, 1e-10);
    const CMatrix a = random_state(d, 1 + trial % d, 300 + trial).matrix();
    const CMatrix b = random_state(d, d, 600 + trial).matrix();
    EXPECT_NEAR(fidelity(a, b), fidelity(b, a), 1e-10);
  }
}

TEST(Fidelity, RejectsNonStates) {
  EXPECT_THROW(fidelity(identity(2), mixed(2)), InvariantError);
  EXPECT_THROW(fidelity(mixed(2), mixed(3)), DimensionError);
}

// sigma_max^2 = (|M|_F^2 + sqrt(|M|_F^4 - 4|det M|^2)) / 2 for 2x2 M
static double two_by_two_norm(const CMatrix& m) {
  const double f = m.squaredNorm();
  const double det = std::norm(m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0));
  return std::sqrt(0.5 * (f + std::sqrt(std::max(0.0, f * f - 4.0 * det))));
}

TEST(OpNorm, Examples) {
  EXPECT_NEAR(op_norm(identity(2)), 1.0, 1e-15);
  const CMatrix m = projector(plus()) * diag({1, 0});
  EXPECT_NEAR(op_norm(m), two_by_two_norm(m), 1e-15);
  EXPECT_NEAR(op_norm(m), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_EQ(op_norm(CMatrix::Zero(3, 3)), 0.0);
}

TEST(OpNorm, AgreesWithTwoByTwoFormula) {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 100; ++trial) {
    const CMatrix m = gaussian_matrix(2, 2, rng);
    EXPECT_NEAR(op_norm(m), two_by_two_norm(m), 1e-12);
  }
}
