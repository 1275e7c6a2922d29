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

// Checkers for the entropic uncertainty relations with quantum memory and
// their recoverability refinements, plus a seeded random-instance fuzzer.
//
//   tripartite:         H(Z|E) + H(X|B) >= -log c
//   tripartite_refined: H(Z|E) + H(X|B) >= -log c - log f
//   bipartite:          H(Z|B) + H(X|B) >= -log c + H(A|B)
//   bipartite_refined:  H(Z|B) + H(X|B) >= -log c - log f + H(A|B)
//
// with f = F(rho_AB, R(sigma_XB)) for the rotated-Petz recovery map R.

#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "eurqsi/entropy.hpp"
#include "eurqsi/qstate.hpp"
#include "eurqsi/quadrature.hpp"
#include "eurqsi/recovery.hpp"

namespace eurqsi {

enum class Relation { tripartite, tripartite_refined, bipartite, bipartite_refined };

inline std::string to_string(Relation r) {
  switch (r) {
    case Relation::tripartite: return "tripartite";
    case Relation::tripartite_refined: return "tripartite_refined";
    case Relation::bipartite: return "bipartite";
    case Relation::bipartite_refined: return "bipartite_refined";
  }
  return "unknown";
}

inline std::optional<Relation> parse_relation(std::string_view s) {
  for (Relation r : {Relation::tripartite, Relation::tripartite_refined, Relation::bipartite,
                     Relation::bipartite_refined}) {
    if (s == to_string(r)) return r;
  }
  return std::nullopt;
}

inline bool is_tripartite(Relation r) {
  return r == Relation::tripartite || r == Relation::tripartite_refined;
}

inline bool is_refined(Relation r) {
  return r == Relation::tripartite_refined || r == Relation::bipartite_refined;
}

/// Entropy terms are eigenvalue-exact; f carries the quadrature error.
inline constexpr double kEntropyTolerance = 1e-9;
inline constexpr double kFidelityTolerance = 1e-6;

struct EurReport {
  Relation relation = Relation::bipartite_refined;
  double h_xb = 0.0;  // H(X|B)_sigma
  double h_zb = 0.0;  // H(Z|B)_omega
  double h_ze = 0.0;  // H(Z|E)_omega
  double h_ab = 0.0;  // H(A|B)_rho
  double c = 0.0;
  double f = 0.0;
  double lhs = 0.0;
  double rhs_original = 0.0;
  double rhs_refined = 0.0;
  double slack_original = 0.0;
  double slack_refined = 0.0;
  double entropy_tolerance = kEntropyTolerance;
  double fidelity_tolerance = kFidelityTolerance;

  double neg_log_c() const { return -std::log2(c); }
  double neg_log_f() const { return -std::log2(f); }

  /// Both relations hold to `tol`.
  bool holds(double tol) const { return slack_original >= -tol && slack_refined >= -tol; }
  bool holds() const { return holds(fidelity_tolerance); }

  /// The refinement never loosens the bound.
  bool refinement_consistent(double tol = 1e-9) const {
    return slack_refined <= slack_original + tol;
  }
};

struct EurOptions {
  Quadrature quadrature = Quadrature::rotation();
  /// Accept a mixed tripartite state by purifying it into an enlarged E.
  bool purify = false;
  /// Tolerance for the purity check of the tripartite input.
  double purity_tolerance = 1e-8;
};

namespace detail {

inline double h_given(const DensityOperator& cq, const std::string& reg, const std::string& cond) {
  return conditional(cq.reduced({reg, cond}), {cond});
}

/// Recovery map for the refinement term: the closed form when Z is rank
/// one, the generic rotated-Petz construction otherwise.
inline CpMap refinement_map(const DensityOperator& rho_ab, const Pvm& x, const Pvm& z,
                            const Quadrature& quad) {
  return z.is_rank_one() ? eur_recovery_map(rho_ab, x, z, quad)
                         : measurement_recovery_map(rho_ab, x, z, quad);
}

/// Fills c, f and the X/B, Z/B and A/B entropies for a state on A B.
inline void fill_common(EurReport& r, const DensityOperator& rho_ab, const Pvm& x, const Pvm& z,
                        const Quadrature& quad) {
  const DensityOperator sigma = measure(rho_ab, x, "A", "X").to_density();
  const DensityOperator omega = measure(rho_ab, z, "A", "Z").to_density();
  r.h_xb = conditional(sigma, {"B"});
  r.h_zb = conditional(omega, {"B"});
  r.h_ab = conditional(rho_ab, {"B"});
  r.c = incompatibility_c(x, z);
  const CpMap rec = refinement_map(rho_ab, x, z, quad);
  const CMatrix recovered = rec.apply(sigma.matrix());
  r.f = fidelity(detail::a_first(rho_ab).matrix(), recovered, 1e-8);
}

inline void finish(EurReport& r, double lhs, double rhs) {
  r.lhs = lhs;
  r.rhs_original = rhs;
  r.rhs_refined = rhs + r.neg_log_f();
  r.slack_original = r.lhs - r.rhs_original;
  r.slack_refined = r.lhs - r.rhs_refined;
}


}  // namespace detail

/// Bipartite relation and its refinement for rho on subsystems labelled A
/// and B (further labels are not allowed). Z must be rank one.
inline EurReport check_bipartite(const DensityOperator& rho_ab, const Pvm& x_pvm,
                                 const Pvm& z_pvm, const EurOptions& opts = {}) {
  if (rho_ab.subsystem_count() != 2 || !rho_ab.has_label("A") || !rho_ab.has_label("B")) {
    throw DimensionError("check_bipartite: state must have exactly the subsystems A and B");
  }
  require_rank_one(z_pvm, "check_bipartite");
  require_pvm_fits(rho_ab, x_pvm, rho_ab.index_of("A"), "check_bipartite");
  require_pvm_fits(rho_ab, z_pvm, rho_ab.index_of("A"), "check_bipartite");
  EurReport r;
  r.relation = Relation::bipartite_refined;
  detail::fill_common(r, rho_ab, x_pvm, z_pvm, opts.quadrature);
  const DensityOperator psi = purify(rho_ab, "E");
  r.h_ze = detail::h_given(measure(psi, z_pvm, "A", "Z").to_density(), "Z", "E");
  detail::finish(r, r.h_zb + r.h_xb, r.neg_log_c() + r.h_ab);
  return r;
}

/// Tripartite relation and its refinement for a pure state on A, B, E. Any
/// PVMs are allowed.
inline EurReport check_tripartite(const DensityOperator& rho_abe, const Pvm& x_pvm,
                                  const Pvm& z_pvm, const EurOptions& opts = {}) {
  if (rho_abe.subsystem_count() != 3 || !rho_abe.has_label("A") || !rho_abe.has_label("B") ||
      !rho_abe.has_label("E")) {
    throw DimensionError("check_tripartite: state must have exactly the subsystems A, B and E");
  }
  DensityOperator rho = rho_abe.reordered({"A", "B", "E"});
  require_pvm_fits(rho, x_pvm, 0, "check_tripartite");
  require_pvm_fits(rho, z_pvm, 0, "check_tripartite");
  if (std::abs(rho.purity() - 1.0) > opts.purity_tolerance) {
    if (!opts.purify) {
      throw InvariantError("check_tripartite: state on ABE is not pure (purity " +
                           std::to_string(rho.purity()) + ")");
    }
    const DensityOperator p = purify(rho, "R");
    const Dims& d = p.dims();
    rho = DensityOperator(p.matrix(), {d[0], d[1], d[2] * d[3]}, {"A", "B", "E"}, 1e-8);
  }
  EurReport r;
  r.relation = Relation::tripartite_refined;
  const DensityOperator rho_ab = rho.reduced({"A", "B"});
  detail::fill_common(r, rho_ab, x_pvm, z_pvm, opts.quadrature);
  r.h_ze = detail::h_given(measure(rho, z_pvm, "A", "Z").to_density(), "Z", "E");
  detail::finish(r, r.h_ze + r.h_xb, r.neg_log_c());
  return r;
}

// ---------------------------------------------------------------------------
// Fuzzing

enum class PvmFamily { pauli, random };

inline std::string to_string(PvmFamily p) { return p == PvmFamily::pauli ? "pauli" : "random"; }

struct FuzzConfig {
  Relation relation = Relation::bipartite_refined;
  std::size_t trials = 1000;
  std::size_t dim_a = 2;
  std::size_t dim_b = 2;
  /// Pauli X/Z needs dim_a = 2; random draws a Haar basis for each.
  PvmFamily pvms = PvmFamily::pauli;
  std::uint64_t seed = 0;
  double tolerance = kFidelityTolerance;
};

struct FuzzInstance {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  DensityOperator rho;
  Pvm x;
  Pvm z;
};

struct FuzzTrial {
  FuzzInstance instance;
  EurReport report;
};

struct FuzzSummary {
  FuzzConfig config;
  std::size_t trials = 0;
  double min_slack_original = std::numeric_limits<double>::infinity();
  double min_slack_refined = std::numeric_limits<double>::infinity();
  /// max over trials of slack_refined - slack_original (<= 1e-9 expected)
  double max_refinement_excess = -std::numeric_limits<double>::infinity();
  std::size_t violations = 0;
  std::optional<FuzzTrial> worst;  // trial attaining min_slack_refined

  bool passed() const { return violations == 0; }
};

/// splitmix64 step, used to derive independent per-trial seeds.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Instance for trial `k`: a function of (config, k) only.
inline FuzzInstance fuzz_instance(const FuzzConfig& cfg, std::size_t k) {
  if (cfg.pvms == PvmFamily::pauli && cfg.dim_a != 2) {
    throw DimensionError("fuzz: Pauli measurements need dim_a = 2");
  }
  const std::uint64_t s = splitmix64(cfg.seed ^ splitmix64(static_cast<std::uint64_t>(k)));
  const std::uint64_t s_state = splitmix64(s + 1);
  const std::uint64_t s_x = splitmix64(s + 2);
  const std::uint64_t s_z = splitmix64(s + 3);
  const std::uint64_t s_rank = splitmix64(s + 4);

  const std::size_t dab = cfg.dim_a * cfg.dim_b;
  const bool tri = is_tripartite(cfg.relation);
  DensityOperator rho =
      tri ? random_state(Dims{cfg.dim_a, cfg.dim_b, dab}, 1, s_state)
          : random_state(Dims{cfg.dim_a, cfg.dim_b}, 1 + s_rank % dab, s_state);
  Pvm x = cfg.pvms == PvmFamily::pauli ? Pvm::pauli_x() : random_pvm(cfg.dim_a, s_x);
  Pvm z = cfg.pvms == PvmFamily::pauli ? Pvm::pauli_z() : random_pvm(cfg.dim_a, s_z);
  return FuzzInstance{k, s, std::move(rho), std::move(x), std::move(z)};
}

inline EurReport check(Relation relation, const DensityOperator& rho, const Pvm& x,
                       const Pvm& z, const EurOptions& opts = {}) {
  EurReport r = is_tripartite(relation) ? check_tripartite(rho, x, z, opts)
                                        : check_bipartite(rho, x, z, opts);
  r.relation = relation;
  return r;
}

/// Runs the trials in index order. Ties for the worst instance go to the
/// lowest trial index.
inline FuzzSummary fuzz(const FuzzConfig& cfg, const EurOptions& opts = {}) {
  if (cfg.trials < 1) throw std::invalid_argument("fuzz: trials must be at least 1");
  FuzzSummary s;
  s.config = cfg;
  for (std::size_t k = 0; k < cfg.trials; ++k) {
    FuzzInstance inst = fuzz_instance(cfg, k);
    EurReport r = check(cfg.relation, inst.rho, inst.x, inst.z, opts);
    ++s.trials;
    s.min_slack_original = std::min(s.min_slack_original, r.slack_original);
    s.max_refinement_excess =
        std::max(s.max_refinement_excess, r.slack_refined - r.slack_original);
    if (!r.holds(cfg.tolerance) || !r.refinement_consistent()) ++s.violations;
    if (!s.worst || r.slack_refined < s.min_slack_refined) {
      s.min_slack_refined = r.slack_refined;
      s.worst = FuzzTrial{std::move(inst), r};
    }
  }
  return s;
}

}  // namespace eurqsi
