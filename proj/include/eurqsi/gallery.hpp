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

// The four worked two-qubit examples (X eigenstate, Z eigenstate, Bell
// state, Y eigenstate with X/Z measurements) as golden cases. Each case
// holds its inputs and the closed-form outputs only; run_all() derives
// everything else through the generic pipeline and compares.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "eurqsi/eur.hpp"

namespace eurqsi::gallery {

enum class CaseId { x_eigen, z_eigen, max_entangled, max_uncertainty };

inline constexpr CaseId kAllCases[] = {CaseId::x_eigen, CaseId::z_eigen, CaseId::max_entangled,
                                       CaseId::max_uncertainty};

inline std::string to_string(CaseId id) {
  switch (id) {
    case CaseId::x_eigen: return "x_eigen";
    case CaseId::z_eigen: return "z_eigen";
    case CaseId::max_entangled: return "max_entangled";
    case CaseId::max_uncertainty: return "max_uncertainty";
  }
  return "unknown";
}

inline CaseId parse_case(std::string_view s) {
  for (CaseId id : kAllCases) {
    if (s == to_string(id)) return id;
  }
  throw std::invalid_argument("unknown gallery case: " + std::string(s));
}

struct RecoveryExpectation {
  std::string name;
  CqState input;            // on X B
  DensityOperator output;   // on A B
};

struct GalleryCase {
  CaseId id;
  std::string map_name;  // R1 .. R4
  DensityOperator rho;
  Pvm x;
  Pvm z;
  /// Stated values: h_ab, h_xb, h_zb, c, f and the derived bound terms.
  EurReport expected;
  CMatrix sigma_xb;
  CMatrix omega_zb;
  CMatrix theta_xb;
  std::vector<RecoveryExpectation> recoveries;
  /// The recovery channel in its closed Kraus form.
  CpMap reference_map;
};

namespace detail {

inline CVector ket2(int k) { return ket(2, static_cast<std::size_t>(k)); }
inline CVector plus() { return (ket2(0) + ket2(1)) / std::sqrt(2.0); }
inline CVector minus() { return (ket2(0) - ket2(1)) / std::sqrt(2.0); }
inline CMatrix pi2() { return identity(2) / 2.0; }
inline CMatrix p(const CVector& v) { return projector(v); }

inline DensityOperator ab(const CMatrix& m) { return DensityOperator(m, {2, 2}, {"A", "B"}); }

inline CqState cq(const std::vector<CMatrix>& blocks, std::string reg = "X") {
  return CqState(blocks, {2}, {"B"}, std::move(reg));
}

inline EurReport expected(double h_ab, double h_xb, double h_zb, double f) {
  EurReport r;
  r.relation = Relation::bipartite_refined;
  r.h_ab = h_ab;
  r.h_xb = h_xb;
  r.h_zb = h_zb;
  r.c = 0.5;
  r.f = f;
  r.lhs = h_xb + h_zb;
  r.rhs_original = 1.0 + h_ab;
  r.rhs_refined = r.rhs_original - std::log2(f);
  r.slack_original = r.lhs - r.rhs_original;
  r.slack_refined = r.lhs - r.rhs_refined;
  return r;
}

/// R1 = R4: xi -> |+><+| (x) <0|xi|0> + |-><-| (x) <1|xi|1>.
inline CpMap r1_map() {
  return CpMap::from_kraus({tensor(outer(plus(), ket2(0)), identity(2)),
                            tensor(outer(minus(), ket2(1)), identity(2))},
                           {2, 2}, {2, 2});
}

/// R2: xi -> |0><0| (x) Tr_X xi.
inline CpMap r2_map() {
  return CpMap::from_kraus({tensor(outer(ket2(0), ket2(0)), identity(2)),
                            tensor(outer(ket2(0), ket2(1)), identity(2))},
                           {2, 2}, {2, 2});
}

/// R3 Kraus set { sum_z (-1)^{xz} (|z>_A |z>_B)(<x|_X <z|_B) }_x.
inline CpMap r3_map() {
  std::vector<CMatrix> ks;
  for (int x = 0; x < 2; ++x) {
    CMatrix k = CMatrix::Zero(4, 4);
    for (int z = 0; z < 2; ++z) {
      k += ((x * z) % 2 ? -1.0 : 1.0) * outer(tensor(ket2(z), ket2(z)), tensor(ket2(x), ket2(z)));
    }
    ks.push_back(std::move(k));
  }
  return CpMap::from_kraus(std::move(ks), {2, 2}, {2, 2});
}

}  // namespace detail

/// The case with its stated inputs and outputs. Throws for an unknown id.
inline GalleryCase build(CaseId id) {
  using namespace detail;
  const CMatrix mixed_xb = tensor(pi2(), pi2());
  switch (id) {
    case CaseId::x_eigen: {
      const CMatrix rho = tensor(p(plus()), pi2());
      return GalleryCase{
          id, "R1", ab(rho), Pvm::pauli_x(), Pvm::pauli_z(), expected(0, 0, 1, 1),
          tensor(p(ket2(0)), pi2()), mixed_xb, mixed_xb,
          {{"R1(sigma_XB)", cq({pi2(), CMatrix::Zero(2, 2)}), ab(rho)},
           {"R1(theta_XB)", cq({pi2() / 2, pi2() / 2}), ab(mixed_xb)}},
          r1_map()};
    }
    case CaseId::z_eigen: {
      const CMatrix rho = tensor(p(ket2(0)), pi2());
      return GalleryCase{
          id, "R2", ab(rho), Pvm::pauli_x(), Pvm::pauli_z(), expected(0, 1, 0, 1),
          mixed_xb, tensor(p(ket2(0)), pi2()), mixed_xb,
          {{"R2(sigma_XB)", cq({pi2() / 2, pi2() / 2}), ab(rho)},
           {"R2(theta_XB)", cq({pi2() / 2, pi2() / 2}), ab(rho)}},
          r2_map()};
    }
    case CaseId::max_entangled: {
      const CVector phi = (tensor(ket2(0), ket2(0)) + tensor(ket2(1), ket2(1))) / std::sqrt(2.0);
      const CMatrix omega = 0.5 * (tensor(p(ket2(0)), p(ket2(0))) + tensor(p(ket2(1)), p(ket2(1))));
      const CMatrix sigma = 0.5 * (tensor(p(ket2(0)), p(plus())) + tensor(p(ket2(1)), p(minus())));
      return GalleryCase{
          id, "R3", ab(p(phi)), Pvm::pauli_x(), Pvm::pauli_z(), expected(-1, 0, 0, 1),
          sigma, omega, mixed_xb,
          {{"R3(sigma_XB)", cq({p(plus()) / 2, p(minus()) / 2}), ab(p(phi))},
           {"R3(theta_XB)", cq({pi2() / 2, pi2() / 2}), ab(omega)}},
          r3_map()};
    }
    case CaseId::max_uncertainty: {
      const CVector plus_y = (ket2(0) + Complex(0, 1) * ket2(1)) / std::sqrt(2.0);
      return GalleryCase{
          id, "R4", ab(tensor(p(plus_y), pi2())), Pvm::pauli_x(), Pvm::pauli_z(),
          expected(0, 1, 1, 0.5), mixed_xb, mixed_xb, mixed_xb,
          {{"R4(sigma_XB)", cq({pi2() / 2, pi2() / 2}), ab(mixed_xb)},
           {"R4(theta_XB)", cq({pi2() / 2, pi2() / 2}), ab(mixed_xb)}},
          r1_map()};
    }
  }
  throw std::invalid_argument("unknown gallery case");
}

// ---------------------------------------------------------------------------
// Ledger

enum class ToleranceClass { entropy, state, recovery, map, fidelity };

inline std::string to_string(ToleranceClass c) {
  switch (c) {
    case ToleranceClass::entropy: return "entropy";
    case ToleranceClass::state: return "state";
    case ToleranceClass::recovery: return "recovery";
    case ToleranceClass::map: return "map";
    case ToleranceClass::fidelity: return "fidelity";
  }
  return "unknown";
}

struct Tolerances {
  double entropy = 1e-9;   // absolute, bits
  double state = 1e-9;     // trace distance
  double recovery = 1e-7;  // trace distance
  double map = 1e-8;       // Choi operator norm
  double fidelity = 1e-6;  // absolute, on -log f

  static Tolerances uniform(double tol) { return {tol, tol, tol, tol, tol}; }

  double of(ToleranceClass c) const {
    switch (c) {
      case ToleranceClass::entropy: return entropy;
      case ToleranceClass::state: return state;
      case ToleranceClass::recovery: return recovery;
      case ToleranceClass::map: return map;
      case ToleranceClass::fidelity: return fidelity;
    }
    return 0.0;
  }
};

struct LedgerEntry {
  std::string case_id;
  std::string quantity;
  ToleranceClass cls;
  std::optional<double> expected;  // scalar quantities only
  std::optional<double> computed;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct Ledger {
  std::vector<LedgerEntry> entries;
  std::vector<std::string> cases;

  bool passed() const {
    for (const auto& e : entries) {
      if (!e.passed) return false;
    }
    return true;
  }

  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& e : entries) n += e.passed ? 0 : 1;
    return n;
  }

  double max_residual(ToleranceClass c) const {
    double m = 0.0;
    for (const auto& e : entries) {
      if (e.cls == c) m = std::max(m, e.residual);
    }
    return m;
  }
};

namespace detail {

class LedgerWriter {
 public:
  LedgerWriter(Ledger& ledger, std::string case_id, const Tolerances& tol)
      : ledger_(ledger), case_(std::move(case_id)), tol_(tol) {}

  void scalar(std::string quantity, ToleranceClass cls, double expected, double computed) {
    add(std::move(quantity), cls, expected, computed, std::abs(expected - computed));
  }

  void residual(std::string quantity, ToleranceClass cls, double r) {
    add(std::move(quantity), cls, std::nullopt, std::nullopt, r);
  }

 private:
  void add(std::string quantity, ToleranceClass cls, std::optional<double> expected,
           std::optional<double> computed, double r) {
    const double tol = tol_.of(cls);
    ledger_.entries.push_back(
        LedgerEntry{case_, std::move(quantity), cls, expected, computed, r, tol, r <= tol});
  }

  Ledger& ledger_;
  std::string case_;
  Tolerances tol_;
};

}  // namespace detail

/// Runs one case through the generic pipeline and appends its residuals.
inline void run_case(const GalleryCase& gc, Ledger& ledger, const Tolerances& tol = {},
                     const Quadrature& quad = Quadrature::rotation()) {
  detail::LedgerWriter w(ledger, to_string(gc.id), tol);
  EurOptions opts;
  opts.quadrature = quad;
  const EurReport r = check_bipartite(gc.rho, gc.x, gc.z, opts);
  const EurReport& e = gc.expected;
  w.scalar("H(A|B)", ToleranceClass::entropy, e.h_ab, r.h_ab);
  w.scalar("H(X|B)", ToleranceClass::entropy, e.h_xb, r.h_xb);
  w.scalar("H(Z|B)", ToleranceClass::entropy, e.h_zb, r.h_zb);
  w.scalar("-log c", ToleranceClass::entropy, e.neg_log_c(), r.neg_log_c());
  w.scalar("lhs", ToleranceClass::entropy, e.lhs, r.lhs);
  w.scalar("rhs_original", ToleranceClass::entropy, e.rhs_original, r.rhs_original);
  w.scalar("-log f", ToleranceClass::fidelity, e.neg_log_f(), r.neg_log_f());
  w.scalar("slack_refined", ToleranceClass::fidelity, e.slack_refined, r.slack_refined);

  w.residual("sigma_XB", ToleranceClass::state,
             trace_distance(measure(gc.rho, gc.x, "A", "X").to_density().matrix(), gc.sigma_xb));
  w.residual("omega_ZB", ToleranceClass::state,
             trace_distance(measure(gc.rho, gc.z, "A", "Z").to_density().matrix(), gc.omega_zb));
  w.residual("theta_XB", ToleranceClass::state,
             trace_distance(theta_state(gc.rho, gc.x, gc.z).to_density().matrix(), gc.theta_xb));

  const CpMap map = eur_recovery_map(gc.rho, gc.x, gc.z, quad);
  for (const auto& rec : gc.recoveries) {
    w.residual(rec.name, ToleranceClass::recovery,
               trace_distance(apply(map, rec.input).matrix(), rec.output.matrix()));
  }
  w.residual(gc.map_name + " Kraus form", ToleranceClass::map, choi_distance(map, gc.reference_map));
  ledger.cases.push_back(to_string(gc.id));
}

/// All four cases plus the R4 = R1 cross-check.
inline Ledger run_all(const Tolerances& tol = {}, const Quadrature& quad = Quadrature::rotation()) {
  Ledger ledger;
  for (CaseId id : kAllCases) run_case(build(id), ledger, tol, quad);
  const GalleryCase g1 = build(CaseId::x_eigen);
  const GalleryCase g4 = build(CaseId::max_uncertainty);
  const CpMap r1 = eur_recovery_map(g1.rho, g1.x, g1.z, quad);
  const CpMap r4 = eur_recovery_map(g4.rho, g4.x, g4.z, quad);
  detail::LedgerWriter(ledger, to_string(CaseId::max_uncertainty), tol)
      .residual("R4 = R1", ToleranceClass::map, choi_distance(r4, r1));
  return ledger;
}

}  // namespace eurqsi::gallery
