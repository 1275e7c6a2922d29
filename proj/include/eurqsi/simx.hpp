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

// Density-matrix circuit simulator for the measurement-reversal
// experiments: qubits plus write-once classical bits, a depolarizing /
// readout-flip noise model, exact outcome distributions and seeded shot
// sampling.
//
// Classical bits are simulated as extra wires after the qubits. Measuring
// qubit q into bit c applies the Kraus pair |k><k|_q (x) X^k_c, so the bit
// wire always holds a diagonal (classical) state and a classically
// controlled gate is an ordinary controlled gate on that wire.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "eurqsi/qmat.hpp"

namespace eurqsi::simx {

// ---------------------------------------------------------------------------
// Gates

namespace gates {

inline CMatrix h() {
  CMatrix m(2, 2);
  m << 1, 1, 1, -1;
  return m / std::sqrt(2.0);
}
inline CMatrix x() {
  CMatrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline CMatrix y() {
  CMatrix m(2, 2);
  m << 0, Complex(0, -1), Complex(0, 1), 0;
  return m;
}
inline CMatrix z() {
  CMatrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline CMatrix s() {
  CMatrix m(2, 2);
  m << 1, 0, 0, Complex(0, 1);
  return m;
}
inline CMatrix sdg() { return s().adjoint(); }

/// Single-qubit gate by name: h, x, y, z, s, sdg, id.
inline CMatrix by_name(const std::string& name) {
  if (name == "h") return h();
  if (name == "x") return x();
  if (name == "y") return y();
  if (name == "z") return z();
  if (name == "s") return s();
  if (name == "sdg") return sdg();
  if (name == "id") return identity(2);
  throw std::invalid_argument("unknown gate: " + name);
}

/// |1..1><1..1| (x) u + (I - |1..1><1..1|) (x) I over controls then target.
inline CMatrix controlled(const CMatrix& u, std::size_t controls) {
  const auto dc = static_cast<Eigen::Index>(std::size_t{1} << controls);
  const Eigen::Index du = u.rows();
  CMatrix m = CMatrix::Identity(dc * du, dc * du);
  m.block((dc - 1) * du, (dc - 1) * du, du, du) = u;
  return m;
}

}  // namespace gates

// ---------------------------------------------------------------------------
// Register

/// Density matrix on n two-level wires; wire 0 is the slowest factor.
class DensityRegister {
 public:
  explicit DensityRegister(std::size_t wires)
      : n_(wires), rho_(CMatrix::Zero(dim(wires), dim(wires))) {
    rho_(0, 0) = 1.0;
  }

  DensityRegister(CMatrix rho, std::size_t wires) : n_(wires), rho_(std::move(rho)) {
    if (rho_.rows() != dim(wires) || rho_.cols() != dim(wires)) {
      throw DimensionError("DensityRegister: matrix does not match the wire count");
    }
  }

  std::size_t wires() const { return n_; }
  const CMatrix& matrix() const { return rho_; }

  /// Applies `u` to the listed wires; the first listed wire is the slowest
  /// factor of `u`.
  void apply_unitary(const CMatrix& u, const std::vector<std::size_t>& on) {
    const CMatrix full = lift(u, on);
    rho_ = full * rho_ * full.adjoint();
  }

  void apply_kraus(const std::vector<CMatrix>& kraus, const std::vector<std::size_t>& on) {
    CMatrix out = CMatrix::Zero(rho_.rows(), rho_.cols());
    for (const auto& k : kraus) {
      const CMatrix full = lift(k, on);
      out += full * rho_ * full.adjoint();
    }
    rho_ = std::move(out);
  }

  /// rho -> (1 - p) rho + p Tr_q(rho) (x) I/2 on wire q.
  void depolarize(std::size_t q, double p) {
    if (p == 0.0) return;
    const double a = std::sqrt(std::max(0.0, 1.0 - 0.75 * p));
    const double b = std::sqrt(0.25 * p);
    apply_kraus({a * identity(2), b * gates::x(), b * gates::y(), b * gates::z()}, {q});
  }

  /// Flips wire q with probability p.
  void bit_flip(std::size_t q, double p) {
    if (p == 0.0) return;
    apply_kraus({std::sqrt(1.0 - p) * identity(2), std::sqrt(p) * gates::x()}, {q});
  }

  /// Reduced density matrix on the listed wires, in the listed order.
  CMatrix reduced(const std::vector<std::size_t>& keep) const {
    check(keep);
    std::vector<std::size_t> sorted = keep;
    std::sort(sorted.begin(), sorted.end());
    const CMatrix r = partial_trace(rho_, Dims(n_, 2), sorted);
    std::vector<std::size_t> perm;
    for (std::size_t w : keep) {
      perm.push_back(static_cast<std::size_t>(
          std::find(sorted.begin(), sorted.end(), w) - sorted.begin()));
    }
    return permute_subsystems(r, Dims(keep.size(), 2), perm);
  }

  /// Computational-basis distribution of the listed wires; outcome index
  /// has the first listed wire as its most significant bit.
  std::vector<double> distribution(const std::vector<std::size_t>& on) const {
    const CMatrix r = reduced(on);
    std::vector<double> p(static_cast<std::size_t>(r.rows()));
    double total = 0.0;
    for (Eigen::Index k = 0; k < r.rows(); ++k) {
      p[static_cast<std::size_t>(k)] = std::max(0.0, r(k, k).real());
      total += p[static_cast<std::size_t>(k)];
    }
    for (auto& v : p) v /= total;
    return p;
  }

 private:
  static Eigen::Index dim(std::size_t wires) {
    return static_cast<Eigen::Index>(std::size_t{1} << wires);
  }

  void check(const std::vector<std::size_t>& on) const {
    for (std::size_t i = 0; i < on.size(); ++i) {
      if (on[i] >= n_) throw DimensionError("DensityRegister: wire out of range");
      for (std::size_t j = 0; j < i; ++j) {
        if (on[i] == on[j]) throw DimensionError("DensityRegister: repeated wire");
      }
    }
  }

  /// Embeds an operator on the listed wires into the full register.
  CMatrix lift(const CMatrix& op, const std::vector<std::size_t>& on) const {
    check(on);
    const auto k = static_cast<Eigen::Index>(std::size_t{1} << on.size());
    if (op.rows() != k || op.cols() != k) {
      throw DimensionError("DensityRegister: operator does not match the wire list");
    }
    const Eigen::Index d = dim(n_);
    std::size_t mask = 0;
    for (std::size_t w : on) mask |= std::size_t{1} << (n_ - 1 - w);
    const auto sub = [&](std::size_t index) {
      std::size_t s = 0;
      for (std::size_t w : on) s = (s << 1) | ((index >> (n_ - 1 - w)) & 1U);
      return static_cast<Eigen::Index>(s);
    };
    CMatrix full = CMatrix::Zero(d, d);
    for (std::size_t i = 0; i < static_cast<std::size_t>(d); ++i) {
      for (std::size_t j = 0; j < static_cast<std::size_t>(d); ++j) {
        if ((i & ~mask) != (j & ~mask)) continue;
        full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = op(sub(i), sub(j));
      }
    }
    return full;
  }

  std::size_t n_;
  CMatrix rho_;
};

// ---------------------------------------------------------------------------
// Circuits

struct NoiseSpec {
  double depolarizing_p = 0.0;  // after every gate, on each qubit it touches
  double readout_flip = 0.0;    // on every recorded measurement bit

  bool noiseless() const { return depolarizing_p == 0.0 && readout_flip == 0.0; }

  void validate() const {
    if (!(depolarizing_p >= 0.0 && depolarizing_p <= 1.0)) {
      throw std::invalid_argument("noise: depolarizing probability must lie in [0, 1]");
    }
    if (!(readout_flip >= 0.0 && readout_flip <= 1.0)) {
      throw std::invalid_argument("noise: readout flip probability must lie in [0, 1]");
    }
  }
};

struct Op {
  enum class Kind { gate, measure, recovery };
  Kind kind = Kind::gate;
  std::string name;                       // gate name or recovery map id
  std::vector<std::size_t> targets;       // qubits
  std::vector<std::size_t> controls;      // qubits
  std::vector<std::size_t> bit_controls;  // classical bits
  std::size_t bit = 0;                    // measurement destination
};

class Circuit {
 public:
  Circuit(std::size_t qubits, std::size_t bits) : qubits_(qubits), bits_(bits) {}

  std::size_t qubit_count() const { return qubits_; }
  std::size_t bit_count() const { return bits_; }
  const std::vector<Op>& ops() const { return ops_; }

  Circuit& gate(std::string name, std::vector<std::size_t> targets,
                std::vector<std::size_t> controls = {}, std::vector<std::size_t> bit_controls = {}) {
    Op op;
    op.kind = Op::Kind::gate;
    op.name = std::move(name);
    op.targets = std::move(targets);
    op.controls = std::move(controls);
    op.bit_controls = std::move(bit_controls);
    return push(std::move(op));
  }

  Circuit& h(std::size_t q) { return gate("h", {q}); }
  Circuit& s(std::size_t q) { return gate("s", {q}); }
  Circuit& sdg(std::size_t q) { return gate("sdg", {q}); }
  Circuit& cx(std::size_t c, std::size_t t) { return gate("x", {t}, {c}); }
  Circuit& cz(std::size_t c, std::size_t t) { return gate("z", {t}, {c}); }

  /// Z-basis measurement of qubit q into classical bit b.
  Circuit& measure(std::size_t q, std::size_t b) {
    Op op;
    op.kind = Op::Kind::measure;
    op.targets = {q};
    op.bit = b;
    return push(std::move(op));
  }

  /// Recovery by map id. "R1": bit_controls {x}, targets {A'} (A' fresh).
  /// "R3": bit_controls {x}, targets {B, A'} (A' fresh).
  Circuit& recovery(std::string map_id, std::size_t x_bit, std::vector<std::size_t> targets) {
    Op op;
    op.kind = Op::Kind::recovery;
    op.name = std::move(map_id);
    op.bit_controls = {x_bit};
    op.targets = std::move(targets);
    return push(std::move(op));
  }

  /// The recovery ops rewritten as gates.
  std::vector<Op> expanded() const {
    std::vector<Op> out;
    for (const Op& op : ops_) {
      if (op.kind != Op::Kind::recovery) {
        out.push_back(op);
        continue;
      }
      const std::size_t xb = op.bit_controls.front();
      Op g;
      g.kind = Op::Kind::gate;
      if (op.name == "R1") {
        // |0> -> |x> -> H|x> = |+> or |->
        const std::size_t a = op.targets.at(0);
        g.name = "x";
        g.targets = {a};
        g.bit_controls = {xb};
        out.push_back(g);
        g.name = "h";
        g.bit_controls.clear();
        out.push_back(g);
      } else if (op.name == "R3") {
        // copy z from B into A', then phase (-1)^{xz}
        const std::size_t b = op.targets.at(0), a = op.targets.at(1);
        g.name = "x";
        g.targets = {a};
        g.controls = {b};
        out.push_back(g);
        g.name = "z";
        g.targets = {b};
        g.controls.clear();
        g.bit_controls = {xb};
        out.push_back(g);
      }
    }
    return out;
  }

 private:
  Circuit& push(Op op) {
    for (std::size_t q : op.targets) {
      if (q >= qubits_) throw DimensionError("circuit: qubit " + std::to_string(q) + " out of range");
    }
    for (std::size_t q : op.controls) {
      if (q >= qubits_) throw DimensionError("circuit: qubit " + std::to_string(q) + " out of range");
    }
    for (std::size_t b : op.bit_controls) {
      if (b >= bits_) throw DimensionError("circuit: bit " + std::to_string(b) + " out of range");
      if (!written_(b)) {
        throw std::invalid_argument("circuit: bit " + std::to_string(b) + " read before written");
      }
    }
    if (op.kind == Op::Kind::gate) gates::by_name(op.name);
    if (op.kind == Op::Kind::recovery && op.name != "R1" && op.name != "R3") {
      throw std::invalid_argument("circuit: unknown recovery map " + op.name);
    }
    if (op.kind == Op::Kind::recovery &&
        op.targets.size() != (op.name == "R1" ? std::size_t{1} : std::size_t{2})) {
      throw DimensionError("circuit: wrong number of targets for " + op.name);
    }
    if (op.kind == Op::Kind::measure) {
      if (op.bit >= bits_) throw DimensionError("circuit: bit " + std::to_string(op.bit) + " out of range");
      if (written_(op.bit)) {
        throw std::invalid_argument("circuit: bit " + std::to_string(op.bit) + " written twice");
      }
      written_bits_.push_back(op.bit);
    }
    ops_.push_back(std::move(op));
    return *this;
  }

  bool written_(std::size_t b) const {
    return std::find(written_bits_.begin(), written_bits_.end(), b) != written_bits_.end();
  }

  std::size_t qubits_;
  std::size_t bits_;
  std::vector<Op> ops_;
  std::vector<std::size_t> written_bits_;
};

/// Wire index of classical bit b.
inline std::size_t bit_wire(const Circuit& c, std::size_t b) { return c.qubit_count() + b; }

/// Executes the circuit from |0...0> (or from `initial` on the qubits, bits
/// starting at 0) and returns the final register.
inline DensityRegister run(const Circuit& circuit, const NoiseSpec& noise = {},
                           const std::optional<CMatrix>& initial = std::nullopt) {
  noise.validate();
  const std::size_t wires = circuit.qubit_count() + circuit.bit_count();
  DensityRegister reg(wires);
  if (initial) {
    CMatrix bits0 = CMatrix::Zero(Eigen::Index(1) << circuit.bit_count(),
                                  Eigen::Index(1) << circuit.bit_count());
    bits0(0, 0) = 1.0;
    reg = DensityRegister(tensor(*initial, bits0), wires);
  }
  for (const Op& op : circuit.expanded()) {
    if (op.kind == Op::Kind::measure) {
      const std::size_t q = op.targets.front(), b = bit_wire(circuit, op.bit);
      const CMatrix p0 = tensor(projector(ket(2, 0)), identity(2));
      const CMatrix p1 = tensor(projector(ket(2, 1)), gates::x());
      reg.apply_kraus({p0, p1}, {q, b});
      reg.bit_flip(b, noise.readout_flip);
      continue;
    }
    std::vector<std::size_t> on;
    for (std::size_t b : op.bit_controls) on.push_back(bit_wire(circuit, b));
    on.insert(on.end(), op.controls.begin(), op.controls.end());
    on.insert(on.end(), op.targets.begin(), op.targets.end());
    CMatrix u = gates::by_name(op.name);
    for (std::size_t t = 1; t < op.targets.size(); ++t) u = tensor(u, gates::by_name(op.name));
    reg.apply_unitary(gates::controlled(u, on.size() - op.targets.size()), on);
    for (std::size_t q : op.controls) reg.depolarize(q, noise.depolarizing_p);
    for (std::size_t q : op.targets) reg.depolarize(q, noise.depolarizing_p);
  }
  return reg;
}

// ---------------------------------------------------------------------------
// Shots

/// Identifier of the sampling algorithm recorded with every shot table.
inline constexpr const char* kSamplerId = "mt19937_64+inverse-cdf";

struct ShotTable {
  std::string basis;                  // e.g. "X" or "XX"
  std::vector<std::string> outcomes;  // "0", "1" or "00".."11"
  std::vector<double> probabilities;  // exact (model) distribution
  std::vector<std::uint64_t> counts;
  std::uint64_t shots = 0;

  double frequency(std::size_t k) const { return double(counts.at(k)) / double(shots); }

  double stderr_of(std::size_t k) const {
    const double p = frequency(k);
    return std::sqrt(p * (1.0 - p) / double(shots));
  }
};

inline std::string bit_string(std::size_t k, std::size_t width) {
  std::string s(width, '0');
  for (std::size_t i = 0; i < width; ++i) {
    if ((k >> (width - 1 - i)) & 1U) s[i] = '1';
  }
  return s;
}

/// Draws `shots` outcomes from `p` by inverse CDF on 53-bit uniforms.
inline std::vector<std::uint64_t> sample_counts(const std::vector<double>& p, std::uint64_t shots,
                                                std::mt19937_64& rng) {
  std::vector<double> cdf(p.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < p.size(); ++k) cdf[k] = acc += p[k];
  std::vector<std::uint64_t> counts(p.size(), 0);
  for (std::uint64_t s = 0; s < shots; ++s) {
    const double u = double(rng() >> 11) * 0x1.0p-53 * acc;
    std::size_t k = 0;
    while (k + 1 < cdf.size() && !(u < cdf[k])) ++k;
    ++counts[k];
  }
  return counts;
}

inline ShotTable make_table(std::string basis, const std::vector<double>& p, std::uint64_t shots,
                            std::mt19937_64& rng) {
  ShotTable t;
  t.basis = std::move(basis);
  const std::size_t width = p.size() == 2 ? 1 : 2;
  for (std::size_t k = 0; k < p.size(); ++k) t.outcomes.push_back(bit_string(k, width));
  t.probabilities = p;
  t.counts = sample_counts(p, shots, rng);
  t.shots = shots;
  return t;
}

/// Bloch vector from X, Y and Z tables: p(0) - p(1) per axis.
inline std::array<double, 3> bloch_tomography(const ShotTable& x, const ShotTable& y,
                                              const ShotTable& z) {
  if (x.shots != y.shots || x.shots != z.shots) {
    throw std::invalid_argument("bloch_tomography: tables have different shot counts");
  }
  std::array<double, 3> r{};
  const ShotTable* t[] = {&x, &y, &z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (t[i]->counts.size() != 2) throw DimensionError("bloch_tomography: single-qubit tables required");
    r[i] = t[i]->frequency(0) - t[i]->frequency(1);
  }
  return r;
}

/// Same-outcome minus different-outcome frequency of a two-qubit table.
inline double correlation(const ShotTable& t) {
  if (t.counts.size() != 4) throw DimensionError("correlation: two-qubit table required");
  return t.frequency(0) + t.frequency(3) - t.frequency(1) - t.frequency(2);
}

// ---------------------------------------------------------------------------
// Experiments

struct ExperimentResult {
  int id = 0;
  std::uint64_t shots = 0;
  std::uint64_t seed = 0;
  NoiseSpec noise;
  std::string sampler = kSamplerId;
  std::vector<ShotTable> tables;  // X, Y, Z (1-4) or XX, YY*, ZZ (5-6)
  /// Bloch vector (1-4) or the three correlations (5-6), with errors.
  std::array<double, 3> estimate{};
  std::array<double, 3> estimate_stderr{};
  CMatrix estimated_state;  // from the shot tables
  CMatrix model_state;      // exact output of the simulated circuit
  CMatrix ideal_state;      // noiseless prediction
  double model_fidelity = 0.0;  // F(ideal, model)
  /// Linear shot estimate of <psi|rho|psi> when the ideal state is pure
  /// (experiments 1 and 5).
  std::optional<double> fidelity_estimate;
  std::optional<double> fidelity_stderr;
};

namespace detail {

inline bool uses_bell_pair(int id) { return id == 5 || id == 6; }

/// Preparation, optional Z measurement, X measurement and recovery; then the
/// basis change and final measurement for `basis` (one letter per output
/// qubit; "y" on B means sigma_Y*).
inline Circuit experiment_circuit(int id, const std::string& basis) {
  if (id < 1 || id > 6) throw std::invalid_argument("experiment id must be 1..6");
  const bool z_first = id == 2 || id == 4 || id == 6;
  const auto rotate = [](Circuit& c, std::size_t q, char axis, bool conjugate) {
    if (axis == 'X') c.h(q);
    if (axis == 'Y') {
      // sigma_Y: S^dagger then H; sigma_Y* = -sigma_Y swaps the outcomes: S then H
      conjugate ? c.s(q) : c.sdg(q);
      c.h(q);
    }
  };
  if (!uses_bell_pair(id)) {
    // qubits A=0, A'=1; bits z=0, x=1, out=2
    Circuit c(2, 3);
    c.h(0);
    if (id == 3 || id == 4) c.s(0);
    if (z_first) c.measure(0, 0);
    c.h(0).measure(0, 1);
    c.recovery("R1", 1, {1});
    rotate(c, 1, basis.at(0), false);
    c.measure(1, 2);
    return c;
  }
  // qubits A=0, B=1, A'=2; bits z=0, x=1, out A'=2, out B=3
  Circuit c(3, 4);
  c.h(0).cx(0, 1);
  if (z_first) c.measure(0, 0);
  c.h(0).measure(0, 1);
  c.recovery("R3", 1, {1, 2});
  rotate(c, 2, basis.at(0), false);
  rotate(c, 1, basis.at(1), true);
  c.measure(2, 2).measure(1, 3);
  return c;
}

inline CMatrix pauli(char axis) {
  return axis == 'X' ? gates::x() : axis == 'Y' ? gates::y() : gates::z();
}

}  // namespace detail

/// The noiseless output state predicted for each experiment.
inline CMatrix ideal_state(int id) {
  const CVector plus = (ket(2, 0) + ket(2, 1)) / std::sqrt(2.0);
  switch (id) {
    case 1: return projector(plus);
    case 2: case 3: case 4: return identity(2) / 2.0;
    case 5: return projector(CVector((ket(4, 0) + ket(4, 3)) / std::sqrt(2.0)));
    case 6: return 0.5 * (projector(ket(4, 0)) + projector(ket(4, 3)));
    default: throw std::invalid_argument("experiment id must be 1..6");
  }
}

/// Runs the three measurement settings of one experiment and samples
/// `shots` outcomes for each from the exact output distribution, using one
/// generator seeded with `seed` for the X, Y, Z settings in turn.
inline ExperimentResult run_experiment(int id, std::uint64_t shots, const NoiseSpec& noise = {},
                                       std::uint64_t seed = 0) {
  if (id < 1 || id > 6) throw std::invalid_argument("experiment id must be 1..6");
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  noise.validate();
  ExperimentResult r;
  r.id = id;
  r.shots = shots;
  r.seed = seed;
  r.noise = noise;
  r.ideal_state = ideal_state(id);
  std::mt19937_64 rng(seed);
  const bool pair = detail::uses_bell_pair(id);

  for (char axis : {'X', 'Y', 'Z'}) {
    const std::string basis = pair ? std::string{axis, axis} : std::string{axis};
    const Circuit c = detail::experiment_circuit(id, basis);
    const DensityRegister reg = run(c, noise);
    std::vector<std::size_t> out;
    if (pair) {
      out = {bit_wire(c, 2), bit_wire(c, 3)};
    } else {
      out = {bit_wire(c, 2)};
    }
    const std::string label = pair ? (axis == 'Y' ? std::string("YY*") : basis) : basis;
    r.tables.push_back(make_table(label, reg.distribution(out), shots, rng));
  }
  // model state: the Z-setting circuit without its final measurements
  {
    const Circuit full = detail::experiment_circuit(id, pair ? "ZZ" : "Z");
    Circuit trimmed(full.qubit_count(), full.bit_count());
    for (const Op& op : full.ops()) {
      if (op.kind == Op::Kind::measure && op.bit >= 2) continue;
      if (op.kind == Op::Kind::gate) trimmed.gate(op.name, op.targets, op.controls, op.bit_controls);
      if (op.kind == Op::Kind::measure) trimmed.measure(op.targets.front(), op.bit);
      if (op.kind == Op::Kind::recovery) trimmed.recovery(op.name, op.bit_controls.front(), op.targets);
    }
    const DensityRegister reg = run(trimmed, noise);
    r.model_state = pair ? reg.reduced({2, 1}) : reg.reduced({1});
  }
  const CMatrix model = 0.5 * (r.model_state + r.model_state.adjoint());
  r.model_fidelity = fidelity(r.ideal_state, model / real_trace(model), 1e-8);

  if (!pair) {
    r.estimate = bloch_tomography(r.tables[0], r.tables[1], r.tables[2]);
    CMatrix rho = identity(2);
    for (std::size_t i = 0; i < 3; ++i) {
      const ShotTable& t = r.tables[i];
      r.estimate_stderr[i] = 2.0 * std::sqrt(t.frequency(0) * t.frequency(1) / double(shots));
      rho += r.estimate[i] * detail::pauli("XYZ"[i]);
    }
    r.estimated_state = rho / 2.0;
    if (id == 1) {
      // <+|rho|+> = (1 + x) / 2 = p_X(0)
      r.fidelity_estimate = r.tables[0].frequency(0);
      r.fidelity_stderr = r.tables[0].stderr_of(0);
    }
    return r;
  }

  // two-qubit estimate from the three correlation settings and their
  // single-qubit marginals; the B outcome of the second setting is sigma_Y*
  CMatrix rho = tensor(identity(2), identity(2));
  for (std::size_t i = 0; i < 3; ++i) {
    const ShotTable& t = r.tables[i];
    const double same = t.frequency(0) + t.frequency(3);
    r.estimate[i] = correlation(t);
    r.estimate_stderr[i] = 2.0 * std::sqrt(same * (1.0 - same) / double(shots));
    const double sign = i == 1 ? -1.0 : 1.0;
    const double a = t.frequency(0) + t.frequency(1) - t.frequency(2) - t.frequency(3);
    const double b = sign * (t.frequency(0) + t.frequency(2) - t.frequency(1) - t.frequency(3));
    const CMatrix s = detail::pauli("XYZ"[i]);
    rho += sign * r.estimate[i] * tensor(s, s) + a * tensor(s, identity(2)) +
           b * tensor(identity(2), s);
  }
  r.estimated_state = rho / 4.0;
  if (id == 5) {
    // <Phi|rho|Phi> = (1 + c_x + c_y* + c_z) / 4 = (s_x + s_y + s_z - 1) / 2
    double f = -0.5, var = 0.0;
    for (const ShotTable& t : r.tables) {
      const double same = t.frequency(0) + t.frequency(3);
      f += 0.5 * same;
      var += 0.25 * same * (1.0 - same) / double(shots);
    }
    r.fidelity_estimate = f;
    r.fidelity_stderr = std::sqrt(var);
  }
  return r;
}

struct SweepPoint {
  double depolarizing_p = 0.0;
  double fidelity_estimate = 0.0;
  double fidelity_stderr = 0.0;
  double model_fidelity = 0.0;
};

/// Recovered-state fidelity of experiment 1 or 5 across depolarizing
/// strengths, every point sampled with the same seed.
inline std::vector<SweepPoint> noise_sweep(int id, const std::vector<double>& strengths,
                                           std::uint64_t shots, std::uint64_t seed,
                                           double readout_flip = 0.0) {
  if (id != 1 && id != 5) {
    throw std::invalid_argument("noise_sweep: experiments 1 and 5 have pure ideal states");
  }
  std::vector<SweepPoint> out;
  for (double p : strengths) {
    const ExperimentResult r = run_experiment(id, shots, NoiseSpec{p, readout_flip}, seed);
    out.push_back(SweepPoint{p, *r.fidelity_estimate, *r.fidelity_stderr, r.model_fidelity});
  }
  return out;
}

/// Non-increasing within `sigmas` combined standard errors between
/// consecutive points.
inline bool fidelity_non_increasing(const std::vector<SweepPoint>& sweep, double sigmas = 2.0) {
  for (std::size_t k = 1; k < sweep.size(); ++k) {
    const double se = std::hypot(sweep[k].fidelity_stderr, sweep[k - 1].fidelity_stderr);
    if (sweep[k].fidelity_estimate > sweep[k - 1].fidelity_estimate + sigmas * se) return false;
  }
  return true;
}

}  // namespace eurqsi::simx
