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

#include "eurqsi/eur.hpp"

#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace eurqsi;
using namespace eurqsi::testing;

namespace {

DensityOperator ab(const CMatrix& m) { return DensityOperator(m, {2, 2}, {"A", "B"}); }

const EurOptions& opts() {
  static const EurOptions o;
  return o;
}

/// H(Z|E) by explicit blocks: omega_ZE = sum_z |z><z| (x) Tr_AB{(|z><z| (x) I) rho}.
double h_z_given_e_oracle(const CMatrix& rho_abe, const Pvm& z, std::size_t de) {
  const std::size_t nz = z.size();
  CMatrix omega = CMatrix::Zero(Eigen::Index(nz * de), Eigen::Index(nz * de));
  for (std::size_t k = 0; k < nz; ++k) {
    const CMatrix p = tensor({z[k], identity(2), identity(de)});
    omega.block(Eigen::Index(k * de), Eigen::Index(k * de), Eigen::Index(de), Eigen::Index(de)) =
        partial_trace(p * rho_abe * p, {2, 2, de}, {2});
  }
  return von_neumann(omega) - von_neumann(partial_trace(omega, {nz, de}, {1}));
}

}  // namespace

TEST(Relation, NamesRoundTrip) {
  for (Relation r : {Relation::tripartite, Relation::tripartite_refined, Relation::bipartite,
                     Relation::bipartite_refined}) {
    EXPECT_EQ(parse_relation(to_string(r)), r);
  }
  EXPECT_FALSE(parse_relation("quadripartite"));
}

TEST(Bipartite, XEigenstateIsSaturated) {
  const EurReport r = check_bipartite(ab(tensor(projector(plus()), mixed(2))), Pvm::pauli_x(),
                                      Pvm::pauli_z(), opts());
  EXPECT_NEAR(r.lhs, 1.0, 1e-9);
  EXPECT_NEAR(r.rhs_original, 1.0, 1e-9);
  EXPECT_NEAR(r.f, 1.0, 1e-6);
  EXPECT_NEAR(r.rhs_refined, 1.0, 1e-6);
  EXPECT_NEAR(r.slack_refined, 0.0, 1e-6);
  EXPECT_TRUE(r.holds());
  EXPECT_TRUE(r.refinement_consistent());
}

TEST(Bipartite, MaximallyEntangledIsSaturated) {
  const EurReport r =
      check_bipartite(ab(projector(bell_phi())), Pvm::pauli_x(), Pvm::pauli_z(), opts());
  EXPECT_NEAR(r.h_xb, 0.0, 1e-9);
  EXPECT_NEAR(r.h_zb, 0.0, 1e-9);
  EXPECT_NEAR(r.h_ab, -1.0, 1e-9);
  EXPECT_NEAR(r.lhs, 0.0, 1e-9);
  EXPECT_NEAR(r.rhs_original, 0.0, 1e-9);
  EXPECT_NEAR(r.f, 1.0, 1e-6);
  EXPECT_NEAR(r.slack_refined, 0.0, 1e-6);
}

TEST(Bipartite, MaximumUncertaintySaturatesOnlyTheRefinement) {
  const EurReport r = check_bipartite(ab(tensor(projector(plus_y()), mixed(2))), Pvm::pauli_x(),
                                      Pvm::pauli_z(), opts());
  EXPECT_NEAR(r.lhs, 2.0, 1e-9);
  EXPECT_NEAR(r.rhs_original, 1.0, 1e-9);
  EXPECT_NEAR(r.slack_original, 1.0, 1e-9);
  EXPECT_NEAR(r.f, 0.5, 1e-6);
  EXPECT_NEAR(r.neg_log_f(), 1.0, 1e-6);
  EXPECT_NEAR(r.rhs_refined, 2.0, 1e-6);
  EXPECT_NEAR(r.slack_refined, 0.0, 1e-6);
}

TEST(Bipartite, RefusesNonRankOneZ) {
  const Pvm coarse({diag({1, 1, 0}), diag({0, 0, 1})});
  const DensityOperator rho = random_state(Dims{3, 2}, 3, 4, {"A", "B"});
  EXPECT_THROW(check_bipartite(rho, Pvm::fourier(3), coarse, opts()), InvariantError);
}

TEST(Bipartite, RejectsWrongSubsystems) {
  const DensityOperator rho = random_state(Dims{2, 2, 2}, 1, 4);
  EXPECT_THROW(check_bipartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), opts()), DimensionError);
  EXPECT_THROW(check_bipartite(random_state(Dims{3, 2}, 2, 1), Pvm::pauli_x(), Pvm::pauli_z()),
               DimensionError);
}

TEST(Tripartite, BellPairWithIdleEve) {
  const CVector psi = tensor(bell_phi(), ket(2, 0));
  const DensityOperator rho = DensityOperator::pure(psi, {2, 2, 2}, {"A", "B", "E"});
  const EurReport r = check_tripartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), opts());
  const double h_ze = h_z_given_e_oracle(rho.matrix(), Pvm::pauli_z(), 2);
  EXPECT_NEAR(h_ze, 1.0, 1e-12);
  EXPECT_NEAR(r.h_ze, h_ze, 1e-9);
  EXPECT_NEAR(r.h_xb, 0.0, 1e-9);
  EXPECT_NEAR(r.h_ab, -1.0, 1e-9);
  EXPECT_NEAR(r.f, 1.0, 1e-6);
  EXPECT_NEAR(r.slack_refined, 0.0, 1e-6);
  EXPECT_EQ(r.relation, Relation::tripartite_refined);
}

TEST(Tripartite, GhzState) {
  const CVector ghz = (ket(8, 0) + ket(8, 7)) / std::sqrt(2.0);
  const DensityOperator rho = DensityOperator::pure(ghz, {2, 2, 2}, {"A", "B", "E"});
  const EurReport r = check_tripartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), opts());
  EXPECT_NEAR(h_z_given_e_oracle(rho.matrix(), Pvm::pauli_z(), 2), 0.0, 1e-12);
  EXPECT_NEAR(r.h_ze, 0.0, 1e-9);
  EXPECT_NEAR(r.h_xb, 1.0, 1e-9);
  EXPECT_GE(r.slack_original, -1e-9);
  EXPECT_GE(r.slack_refined, -1e-6);
}

TEST(Tripartite, MixedInputNeedsPurification) {
  const DensityOperator rho(tensor({projector(plus()), mixed(2), diag({1, 0})}), {2, 2, 2},
                            {"A", "B", "E"});
  EXPECT_THROW(check_tripartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), opts()), InvariantError);
  EurOptions o;
  o.purify = true;
  const EurReport tri = check_tripartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), o);
  const EurReport bi = check_bipartite(rho.reduced({"A", "B"}), Pvm::pauli_x(), Pvm::pauli_z());
  EXPECT_NEAR(tri.h_xb, bi.h_xb, 1e-12);
  EXPECT_NEAR(tri.h_zb, bi.h_zb, 1e-12);
  EXPECT_NEAR(tri.f, bi.f, 1e-12);
  EXPECT_NEAR(tri.h_ze, bi.h_ze, 1e-9);
  EXPECT_NEAR(tri.h_ze - tri.h_zb, -tri.h_ab, 1e-9);
}

TEST(Tripartite, AcceptsCoarseZ) {
  const Pvm coarse({diag({1, 1, 0}), diag({0, 0, 1})});
  const DensityOperator rho = random_state(Dims{3, 2, 6}, 1, 12);
  const EurReport r = check_tripartite(rho, Pvm::fourier(3), coarse, opts());
  EXPECT_GE(r.slack_original, -1e-9);
  EXPECT_GE(r.slack_refined, -1e-6);
  EXPECT_TRUE(r.refinement_consistent());
}

TEST(Tripartite, LabelOrderDoesNotMatter) {
  const DensityOperator rho = random_state(Dims{2, 2, 4}, 1, 3);
  const DensityOperator shuffled = rho.reordered({"E", "A", "B"});
  const EurReport a = check_tripartite(rho, Pvm::pauli_x(), Pvm::pauli_z(), opts());
  const EurReport b = check_tripartite(shuffled, Pvm::pauli_x(), Pvm::pauli_z(), opts());
  EXPECT_NEAR(a.slack_refined, b.slack_refined, 1e-10);
}

TEST(Consistency, DualityBetweenCheckers) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const std::size_t da = 2 + seed % 2;
    const DensityOperator rho = random_state(Dims{da, 2, 2 * da}, 1, seed);
    const Pvm x = random_pvm(da, 100 + seed), z = random_pvm(da, 200 + seed);
    const EurReport tri = check_tripartite(rho, x, z, opts());
    const EurReport bi = check_bipartite(rho.reduced({"A", "B"}), x, z, opts());
    EXPECT_NEAR(tri.h_ze - bi.h_zb, -bi.h_ab, 1e-8);
    EXPECT_NEAR(tri.h_ze, bi.h_ze, 1e-8);
    EXPECT_NEAR(tri.f, bi.f, 1e-10);
    EXPECT_NEAR(tri.slack_refined, bi.slack_refined, 1e-8);
  }
}

TEST(Fuzz, TwoQubitPauli) {
  FuzzConfig cfg;
  cfg.trials = 200;
  cfg.seed = 5;
  const FuzzSummary s = fuzz(cfg, opts());
  EXPECT_EQ(s.trials, 200u);
  EXPECT_GE(s.min_slack_refined, -1e-7);
  EXPECT_LE(s.max_refinement_excess, 1e-9);
  EXPECT_EQ(s.violations, 0u);
  ASSERT_TRUE(s.worst);
  EXPECT_EQ(s.worst->report.slack_refined, s.min_slack_refined);
}

TEST(Fuzz, QutritRandomPvms) {
  FuzzConfig cfg;
  cfg.trials = 40;
  cfg.dim_a = cfg.dim_b = 3;
  cfg.pvms = PvmFamily::random;
  cfg.seed = 9;
  const FuzzSummary s = fuzz(cfg, opts());
  EXPECT_GE(s.min_slack_refined, -1e-6);
  EXPECT_TRUE(s.passed());
}

TEST(Fuzz, Tripartite) {
  FuzzConfig cfg;
  cfg.relation = Relation::tripartite_refined;
  cfg.trials = 40;
  cfg.pvms = PvmFamily::random;
  const FuzzSummary s = fuzz(cfg, opts());
  EXPECT_TRUE(s.passed());
  EXPECT_EQ(s.worst->instance.rho.subsystem_count(), 3u);
}

TEST(Fuzz, ReplayIsBitIdentical) {
  FuzzConfig cfg;
  cfg.trials = 1;
  cfg.seed = 1234;
  const FuzzSummary a = fuzz(cfg, opts());
  const FuzzSummary b = fuzz(cfg, opts());
  const EurReport& ra = a.worst->report;
  const EurReport& rb = b.worst->report;
  for (auto field : {&EurReport::h_xb, &EurReport::h_zb, &EurReport::h_ze, &EurReport::h_ab,
                     &EurReport::c, &EurReport::f, &EurReport::lhs, &EurReport::rhs_original,
                     &EurReport::rhs_refined, &EurReport::slack_original,
                     &EurReport::slack_refined}) {
    EXPECT_EQ(ra.*field, rb.*field);
  }
  EXPECT_EQ(a.worst->instance.rho.matrix(), b.worst->instance.rho.matrix());
  EXPECT_EQ(a.worst->instance.seed, b.worst->instance.seed);
}

TEST(Fuzz, InstancesDependOnTrialIndex) {
  FuzzConfig cfg;
  EXPECT_NE(fuzz_instance(cfg, 0).rho.matrix(), fuzz_instance(cfg, 1).rho.matrix());
  cfg.dim_a = 3;
  EXPECT_THROW(fuzz_instance(cfg, 0), DimensionError);
  cfg.trials = 0;
  EXPECT_THROW(fuzz(cfg), std::invalid_argument);
}
