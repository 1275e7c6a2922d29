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

#include "eurqsi/simx.hpp"

#include <gtest/gtest.h>

#include "eurqsi/gallery.hpp"
#include "test_util.hpp"

using namespace eurqsi;
using namespace eurqsi::simx;

namespace {

CMatrix pauli_state(double x, double y, double z) {
  return 0.5 * (identity(2) + x * gates::x() + y * gates::y() + z * gates::z());
}

}  // namespace

TEST(Register, HadamardPreparesPlus) {
  DensityRegister reg(1);
  reg.apply_unitary(gates::h(), {0});
  EXPECT_LT(max_abs(reg.matrix() - projector(eurqsi::testing::plus())), 1e-15);
}

TEST(Register, LiftRespectsWireOrder) {
  // X on wire 2 of three maps |000> to |001>
  DensityRegister reg(3);
  reg.apply_unitary(gates::x(), {2});
  EXPECT_NEAR(reg.matrix()(1, 1).real(), 1.0, 1e-15);
  // CNOT with control 2, target 0: |001> -> |101>
  reg.apply_unitary(gates::controlled(gates::x(), 1), {2, 0});
  EXPECT_NEAR(reg.matrix()(5, 5).real(), 1.0, 1e-15);
  const auto p = reg.distribution({0, 1});
  EXPECT_NEAR(p[2], 1.0, 1e-15);
}

TEST(Register, FullDepolarizingGivesMaximallyMixed) {
  DensityRegister reg(2);
  reg.apply_unitary(gates::h(), {0});
  reg.apply_unitary(gates::controlled(gates::x(), 1), {0, 1});
  reg.depolarize(0, 1.0);
  EXPECT_LT(max_abs(reg.reduced({0}) - eurqsi::testing::mixed(2)), 1e-15);
  // the partner keeps its marginal, correlations are gone
  EXPECT_LT(max_abs(reg.matrix() - eurqsi::testing::mixed(4)), 1e-15);
}

TEST(Register, PartialDepolarizingShrinksBloch) {
  DensityRegister reg(pauli_state(0.6, 0.0, 0.8), 1);
  reg.depolarize(0, 0.25);
  EXPECT_LT(max_abs(reg.matrix() - pauli_state(0.45, 0.0, 0.6)), 1e-15);
}

TEST(Register, ReducedFollowsRequestedOrder) {
  DensityRegister reg(2);
  reg.apply_unitary(gates::x(), {1});
  EXPECT_NEAR(reg.reduced({1, 0})(2, 2).real(), 1.0, 1e-15);
  EXPECT_THROW(reg.reduced({0, 0}), DimensionError);
}

TEST(Circuit, ValidatesClassicalBits) {
  Circuit c(2, 2);
  EXPECT_THROW(c.gate("x", {0}, {}, {0}), std::invalid_argument);  // read before write
  c.measure(0, 0);
  EXPECT_THROW(c.measure(1, 0), std::invalid_argument);  // written twice
  EXPECT_THROW(c.measure(2, 1), DimensionError);
  EXPECT_THROW(c.gate("t", {0}), std::invalid_argument);
  EXPECT_NO_THROW(c.gate("x", {1}, {}, {0}));
}

TEST(Circuit, MeasurementRecordsAndDephases) {
  Circuit c(1, 1);
  c.h(0).measure(0, 0);
  const DensityRegister reg = run(c);
  EXPECT_LT(max_abs(reg.reduced({0}) - eurqsi::testing::mixed(2)), 1e-15);
  // qubit and bit perfectly correlated
  const auto p = reg.distribution({0, 1});
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[3], 0.5, 1e-15);
}

TEST(Circuit, ReadoutFlipActsOnRecordOnly) {
  Circuit c(1, 1);
  c.measure(0, 0);
  const DensityRegister reg = run(c, NoiseSpec{0.0, 0.1});
  const auto p = reg.distribution({0, 1});
  EXPECT_NEAR(p[0], 0.9, 1e-15);
  EXPECT_NEAR(p[1], 0.1, 1e-15);
}

TEST(Circuit, RejectsBadNoise) {
  Circuit c(1, 0);
  EXPECT_THROW(run(c, NoiseSpec{1.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(run(c, NoiseSpec{0.0, -0.1}), std::invalid_argument);
}

// Quantum-controlled version of the R3 circuit on registers X, B, A' against
// the Kraus form.
TEST(Circuit, R3CircuitMatchesKrausForm) {
  const CpMap r3 = gallery::detail::r3_map();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMatrix xb = random_state(Dims{2, 2}, 1 + seed % 4, seed).matrix();
    DensityRegister reg(tensor(xb, projector(ket(2, 0))), 3);
    reg.apply_unitary(gates::controlled(gates::x(), 1), {1, 2});
    reg.apply_unitary(gates::controlled(gates::z(), 1), {0, 1});
    EXPECT_LT(max_abs(reg.reduced({2, 1}) - r3.apply(xb)), 1e-10) << seed;
  }
}

TEST(Circuit, R1CircuitMatchesKrausForm) {
  const CpMap r1 = gallery::detail::r1_map();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const CMatrix xb = random_state(Dims{2, 2}, 1 + seed % 4, seed).matrix();
    DensityRegister reg(tensor(xb, projector(ket(2, 0))), 3);
    reg.apply_unitary(gates::controlled(gates::x(), 1), {0, 2});
    reg.apply_unitary(gates::h(), {2});
    EXPECT_LT(max_abs(reg.reduced({2, 1}) - r1.apply(xb)), 1e-10) << seed;
  }
}

TEST(Sampling, InverseCdfIsDeterministicAndSkipsZeros) {
  std::mt19937_64 a(7), b(7);
  const std::vector<double> p{0.25, 0.0, 0.75};
  const auto ca = sample_counts(p, 4000, a);
  EXPECT_EQ(ca, sample_counts(p, 4000, b));
  EXPECT_EQ(ca[1], 0u);
  EXPECT_EQ(ca[0] + ca[2], 4000u);
  EXPECT_NEAR(double(ca[0]) / 4000.0, 0.25, 4.0 * std::sqrt(0.25 * 0.75 / 4000.0));
}

TEST(Sampling, BlochTomographyRequiresMatchingShots) {
  std::mt19937_64 rng(1);
  const ShotTable x = make_table("X", {1.0, 0.0}, 10, rng);
  const ShotTable y = make_table("Y", {0.5, 0.5}, 10, rng);
  const ShotTable z = make_table("Z", {0.5, 0.5}, 11, rng);
  EXPECT_THROW(bloch_tomography(x, y, z), std::invalid_argument);
  EXPECT_DOUBLE_EQ(bloch_tomography(x, y, y)[0], 1.0);
}

TEST(Experiment, ModelStatesMatchPredictions) {
  for (int id = 1; id <= 6; ++id) {
    const ExperimentResult r = run_experiment(id, 16);
    EXPECT_LT(max_abs(r.model_state - ideal_state(id)), 1e-12) << id;
    EXPECT_NEAR(r.model_fidelity, 1.0, 1e-9) << id;
  }
}

TEST(Experiment, ModelDistributionsMatchStatedOutcomes) {
  const ExperimentResult e1 = run_experiment(1, 16);
  EXPECT_NEAR(e1.tables[0].probabilities[0], 1.0, 1e-12);
  EXPECT_NEAR(e1.tables[1].probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(e1.tables[2].probabilities[0], 0.5, 1e-12);
  for (const ShotTable& t : run_experiment(5, 16).tables) {
    EXPECT_NEAR(t.probabilities[0], 0.5, 1e-12) << t.basis;
    EXPECT_NEAR(t.probabilities[3], 0.5, 1e-12) << t.basis;
  }
  const ExperimentResult e6 = run_experiment(6, 16);
  for (double p : e6.tables[0].probabilities) EXPECT_NEAR(p, 0.25, 1e-12);
  for (double p : e6.tables[1].probabilities) EXPECT_NEAR(p, 0.25, 1e-12);
  EXPECT_NEAR(e6.tables[2].probabilities[0], 0.5, 1e-12);
  EXPECT_NEAR(e6.tables[2].probabilities[3], 0.5, 1e-12);
  EXPECT_EQ(e6.tables[1].basis, "YY*");
}

TEST(Experiment, RecoveredStatesMatchGalleryOutputs) {
  // experiment 1 is the X-eigenstate case on A alone; experiment 5 is the
  // maximally entangled case
  const auto g1 = gallery::build(gallery::CaseId::x_eigen);
  const CMatrix a = partial_trace(g1.recoveries.front().output.matrix(), {2, 2}, {0});
  EXPECT_LT(max_abs(run_experiment(1, 16).model_state - a), 1e-12);
  const auto g2 = gallery::build(gallery::CaseId::max_entangled);
  EXPECT_LT(max_abs(run_experiment(5, 16).model_state - g2.recoveries.front().output.matrix()),
            1e-12);
}

TEST(Experiment, FrequenciesWithinFourSigma) {
  for (int id = 1; id <= 6; ++id) {
    const ExperimentResult r = run_experiment(id, 8192, {}, 2024);
    for (const ShotTable& t : r.tables) {
      for (std::size_t k = 0; k < t.counts.size(); ++k) {
        const double p = t.probabilities[k];
        const double sigma = std::sqrt(p * (1.0 - p) / 8192.0);
        EXPECT_LE(std::abs(t.frequency(k) - p), 4.0 * sigma + 1e-15)
            << "exp " << id << " " << t.basis << " " << t.outcomes[k];
      }
    }
  }
}

TEST(Experiment, SameSeedSameCounts) {
  const auto a = run_experiment(6, 1000, NoiseSpec{0.05, 0.01}, 3);
  const auto b = run_experiment(6, 1000, NoiseSpec{0.05, 0.01}, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(a.tables[i].counts, b.tables[i].counts);
  EXPECT_EQ(a.sampler, std::string("mt19937_64+inverse-cdf"));
}

TEST(Experiment, EstimatedStatesApproachModel) {
  const ExperimentResult r3 = run_experiment(3, 8192, {}, 11);
  EXPECT_LT(trace_distance(r3.estimated_state, r3.model_state), 0.05);
  const ExperimentResult r5 = run_experiment(5, 8192, {}, 11);
  EXPECT_LT(trace_distance(r5.estimated_state, r5.model_state), 0.05);
  EXPECT_NEAR(r5.estimate[1], 1.0, 1e-12);  // Y (x) Y* is deterministic on Phi
}

TEST(Experiment, RejectsBadArguments) {
  EXPECT_THROW(run_experiment(0, 10), std::invalid_argument);
  EXPECT_THROW(run_experiment(7, 10), std::invalid_argument);
  EXPECT_THROW(run_experiment(1, 0), std::invalid_argument);
  EXPECT_THROW(noise_sweep(2, {0.0}, 10, 0), std::invalid_argument);
}

TEST(Noise, ModelFidelityDecreasesWithDepolarizing) {
  for (int id : {1, 5}) {
    double last = 2.0;
    for (double p : {0.0, 0.05, 0.1, 0.2}) {
      const double f = run_experiment(id, 1, NoiseSpec{p, 0.0}).model_fidelity;
      EXPECT_LT(f, last + 1e-12) << id << " " << p;
      last = f;
    }
    EXPECT_LT(last, 0.9);
  }
}

TEST(Noise, SweepNonIncreasingWithinTwoSigma) {
  for (int id : {1, 5}) {
    const auto sweep = noise_sweep(id, {0.0, 0.05, 0.1, 0.2}, 8192, 99);
    EXPECT_TRUE(fidelity_non_increasing(sweep)) << id;
    EXPECT_NEAR(sweep.front().fidelity_estimate, 1.0, 1e-12);
  }
}

TEST(Noise, MonotonicityCheckFlagsIncrease) {
  std::vector<SweepPoint> s{{0.0, 0.8, 0.01, 0.8}, {0.1, 0.9, 0.01, 0.7}};
  EXPECT_FALSE(fidelity_non_increasing(s));
}
