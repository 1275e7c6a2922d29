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

// States, projective measurements and the measurement bookkeeping used by
// the uncertainty-relation checks.

#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "eurqsi/qmat.hpp"

namespace eurqsi {

using Labels = std::vector<std::string>;

/// Tolerance for the density-operator invariants of freshly built states.
inline constexpr double kStateTolerance = 1e-10;

inline Labels default_labels(std::size_t n) {
  static const char* kNames[] = {"A", "B", "E"};
  Labels out;
  for (std::size_t k = 0; k < n; ++k) {
    out.push_back(k < 3 ? kNames[k] : "S" + std::to_string(k));
  }
  return out;
}

// ---------------------------------------------------------------------------

/// Positive unit-trace operator on a labelled tensor product.
class DensityOperator {
 public:
  DensityOperator(CMatrix matrix, Dims dims, Labels labels,
                  double tol = kStateTolerance)
      : matrix_(std::move(matrix)), dims_(std::move(dims)), labels_(std::move(labels)) {
    if (dims_.empty() || product(dims_) != static_cast<std::size_t>(matrix_.rows())) {
      throw DimensionError("DensityOperator: dims do not match matrix dimension");
    }
    if (labels_.size() != dims_.size()) {
      throw DimensionError("DensityOperator: one label per subsystem required");
    }
    for (std::size_t i = 0; i < labels_.size(); ++i) {
      for (std::size_t j = i + 1; j < labels_.size(); ++j) {
        if (labels_[i] == labels_[j]) {
          throw DimensionError("DensityOperator: duplicate label " + labels_[i]);
        }
      }
    }
    require_state(matrix_, tol, "DensityOperator");
  }

  DensityOperator(CMatrix matrix, Dims dims)
      : DensityOperator(std::move(matrix), dims, default_labels(dims.size())) {}

  static DensityOperator pure(const CVector& psi, Dims dims, Labels labels) {
    return DensityOperator(projector(psi), std::move(dims), std::move(labels));
  }

  const CMatrix& matrix() const { return matrix_; }
  const Dims& dims() const { return dims_; }
  const Labels& labels() const { return labels_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }
  std::size_t subsystem_count() const { return dims_.size(); }

  bool has_label(std::string_view label) const {
    return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
  }

  std::size_t index_of(std::string_view label) const {
    auto it = std::find(labels_.begin(), labels_.end(), label);
    if (it == labels_.end()) {
      throw DimensionError("label not found: " + std::string(label));
    }
    return static_cast<std::size_t>(it - labels_.begin());
  }

  /// Reduced state on the listed subsystems, in their original order.
  DensityOperator reduced(const Labels& keep) const {
    std::vector<std::size_t> idx;
    for (const auto& l : keep) idx.push_back(index_of(l));
    std::sort(idx.begin(), idx.end());
    Dims d;
    Labels l;
    for (auto k : idx) {
      d.push_back(dims_[k]);
      l.push_back(labels_[k]);
    }
    return DensityOperator(partial_trace(matrix_, dims_, idx), d, l, 1e-8);
  }

  /// Same state with its factors reordered as `order` (a permutation of the
  /// labels).
  DensityOperator reordered(const Labels& order) const {
    if (order.size() != labels_.size()) {
      throw DimensionError("reordered: label list must name every subsystem");
    }
    std::vector<std::size_t> perm;
    Dims d;
    for (const auto& l : order) {
      perm.push_back(index_of(l));
      d.push_back(dims_[perm.back()]);
    }
    return DensityOperator(permute_subsystems(matrix_, dims_, perm), d, order, 1e-8);
  }

  /// Labels other than the listed ones, in subsystem order.
  Labels complement(const Labels& excluded) const {
    Labels out;
    for (const auto& l : labels_) {
      if (std::find(excluded.begin(), excluded.end(), l) == excluded.end()) {
        out.push_back(l);
      }
    }
    return out;
  }

  double purity() const { return (matrix_ * matrix_).trace().real(); }

 private:
  CMatrix matrix_;
  Dims dims_;
  Labels labels_;
};

// ---------------------------------------------------------------------------

/// Projection-valued measure; outcome k is projectors()[k].
class Pvm {
 public:
  explicit Pvm(std::vector<CMatrix> projectors, double tol = kStateTolerance)
      : projectors_(std::move(projectors)) {
    if (projectors_.empty()) throw InvariantError("Pvm: no projectors");
    const auto d = projectors_.front().rows();
    CMatrix sum = CMatrix::Zero(d, d);
    for (std::size_t k = 0; k < projectors_.size(); ++k) {
      const CMatrix& p = projectors_[k];
      if (p.rows() != d || p.cols() != d) {
        throw DimensionError("Pvm: projectors have different dimensions");
      }
      const std::string tag = "Pvm: projector " + std::to_string(k);
      if (!all_finite(p)) throw InvariantError(tag + " has a non-finite entry");
      if (max_abs(p - p.adjoint()) > tol) {
        throw InvariantError(tag + " is not Hermitian (P = P^dagger)");
      }
      if (max_abs(p * p - p) > tol) {
        throw InvariantError(tag + " is not idempotent (P^2 = P)");
      }
      for (std::size_t j = 0; j < k; ++j) {
        if (max_abs(projectors_[j] * p) > tol) {
          throw InvariantError("Pvm: projectors " + std::to_string(j) + " and " +
                               std::to_string(k) + " are not orthogonal");
        }
      }
      sum += p;
    }
    if (max_abs(sum - CMatrix::Identity(d, d)) > tol) {
      throw InvariantError("Pvm: projectors do not sum to the identity");
    }
  }

  /// Rank-one measurement in the orthonormal basis formed by the columns.
  static Pvm from_basis(const CMatrix& basis) {
    std::vector<CMatrix> ps;
    for (Eigen::Index k = 0; k < basis.cols(); ++k) {
      ps.push_back(projector(basis.col(k)));
    }
    return Pvm(std::move(ps));
  }

  static Pvm computational(std::size_t d) { return from_basis(identity(d)); }

  /// sigma_Z eigenbasis; outcome 0 is |0>, outcome 1 is |1>.
  static Pvm pauli_z() { return computational(2); }

  /// sigma_X eigenbasis; outcome 0 is |+>, outcome 1 is |->.
  static Pvm pauli_x() {
    CMatrix b(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    b << s, s, s, -s;
    return from_basis(b);
  }

  /// sigma_Y eigenbasis; outcome 0 is |+_Y>, outcome 1 is |-_Y>.
  static Pvm pauli_y() {
    CMatrix b(2, 2);
    const double s = 1.0 / std::sqrt(2.0);
    b << s, s, Complex(0, s), Complex(0, -s);
    return from_basis(b);
  }

  /// Discrete Fourier basis |k> = d^{-1/2} sum_j e^{2 pi i jk/d} |j>.
  static Pvm fourier(std::size_t d) {
    CMatrix b(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    const double pi = std::acos(-1.0);
    for (std::size_t j = 0; j < d; ++j) {
      for (std::size_t k = 0; k < d; ++k) {
        b(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) =
            std::polar(1.0 / std::sqrt(double(d)), 2.0 * pi * double(j * k) / double(d));
      }
    }
    return from_basis(b);
  }

  std::size_t size() const { return projectors_.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(projectors_.front().rows()); }
  const CMatrix& operator[](std::size_t k) const { return projectors_.at(k); }
  const std::vector<CMatrix>& projectors() const { return projectors_; }

  std::size_t rank(std::size_t k) const {
    return static_cast<std::size_t>(std::llround(real_trace(projectors_.at(k))));
  }

  bool is_rank_one() const {
    for (std::size_t k = 0; k < size(); ++k) {
      if (rank(k) != 1) return false;
    }
    return true;
  }

  /// Unit vector spanning projector k of a rank-one PVM.
  CVector basis_vector(std::size_t k) const {
    const HermEig eig = herm_eig(projectors_.at(k));
    return eig.vectors.col(0);
  }

 private:
  std::vector<CMatrix> projectors_;
};

inline void require_rank_one(const Pvm& pvm, const char* what) {
  if (!pvm.is_rank_one()) {
    throw InvariantError(std::string(what) + ": the Z measurement must be rank one");
  }
}

// ---------------------------------------------------------------------------

/// Classical-quantum state sum_k |k><k| (x) block_k. Blocks are
/// unnormalised; their traces are the outcome probabilities.
class CqState {
 public:
  CqState(std::vector<CMatrix> blocks, Dims quantum_dims, Labels quantum_labels,
          std::string register_label, double tol = 1e-8)
      : blocks_(std::move(blocks)),
        dims_(std::move(quantum_dims)),
        labels_(std::move(quantum_labels)),
        register_(std::move(register_label)) {
    if (blocks_.empty()) throw DimensionError("CqState: no blocks");
    const auto d = static_cast<Eigen::Index>(product(dims_));
    double total = 0.0;
    for (std::size_t k = 0; k < blocks_.size(); ++k) {
      const CMatrix& b = blocks_[k];
      if (b.rows() != d || b.cols() != d) {
        throw DimensionError("CqState: block " + std::to_string(k) + " has wrong dimension");
      }
      if (!is_hermitian(b, tol)) {
        throw InvariantError("CqState: block " + std::to_string(k) + " is not Hermitian");
      }
      if (herm_eig(b).min_value() < -tol) {
        throw InvariantError("CqState: block " + std::to_string(k) + " is not PSD");
      }
      total += real_trace(b);
    }
    if (std::abs(total - 1.0) > tol) {
      throw InvariantError("CqState: block traces sum to " + std::to_string(total));
    }
  }

  std::size_t outcomes() const { return blocks_.size(); }
  const CMatrix& block(std::size_t k) const { return blocks_.at(k); }
  const std::vector<CMatrix>& blocks() const { return blocks_; }
  const Dims& quantum_dims() const { return dims_; }
  const Labels& quantum_labels() const { return labels_; }
  const std::string& register_label() const { return register_; }

  double probability(std::size_t k) const { return real_trace(blocks_.at(k)); }

  /// Block-diagonal density operator with the register as subsystem 0.
  DensityOperator to_density() const {
    const auto d = static_cast<Eigen::Index>(product(dims_));
    const auto n = static_cast<Eigen::Index>(blocks_.size());
    CMatrix m = CMatrix::Zero(n * d, n * d);
    for (Eigen::Index k = 0; k < n; ++k) m.block(k * d, k * d, d, d) = blocks_[k];
    Dims dims{blocks_.size()};
    dims.insert(dims.end(), dims_.begin(), dims_.end());
    Labels labels{register_};
    labels.insert(labels.end(), labels_.begin(), labels_.end());
    return DensityOperator(std::move(m), std::move(dims), std::move(labels), 1e-8);
  }

  /// Reads the diagonal blocks of a state whose subsystem 0 is the register;
  /// off-diagonal blocks are dropped.
  static CqState from_density(const DensityOperator& rho) {
    const std::size_t n = rho.dims().front();
    const auto d = static_cast<Eigen::Index>(rho.dim() / n);
    std::vector<CMatrix> blocks;
    for (std::size_t k = 0; k < n; ++k) {
      blocks.push_back(rho.matrix().block(static_cast<Eigen::Index>(k) * d,
                                          static_cast<Eigen::Index>(k) * d, d, d));
    }
    Dims qd(rho.dims().begin() + 1, rho.dims().end());
    Labels ql(rho.labels().begin() + 1, rho.labels().end());
    return CqState(std::move(blocks), std::move(qd), std::move(ql), rho.labels().front());
  }

 private:
  std::vector<CMatrix> blocks_;
  Dims dims_;
  Labels labels_;
  std::string register_;
};

// ---------------------------------------------------------------------------
// Measurements

inline void require_pvm_fits(const DensityOperator& rho, const Pvm& pvm,
                             std::size_t index, const char* what) {
  if (pvm.dim() != rho.dims()[index]) {
    throw DimensionError(std::string(what) + ": PVM dimension " +
                         std::to_string(pvm.dim()) + " does not match subsystem " +
                         rho.labels()[index] + " of dimension " +
                         std::to_string(rho.dims()[index]));
  }
}

/// Measures `measured` with `pvm`; block k is Tr_measured{(P^k (x) I) rho}.
inline CqState measure(const DensityOperator& rho, const Pvm& pvm,
                       std::string_view measured, std::string register_label) {
  const std::size_t idx = rho.index_of(measured);
  require_pvm_fits(rho, pvm, idx, "measure");
  std::vector<std::size_t> keep;
  Dims qd;
  Labels ql;
  for (std::size_t k = 0; k < rho.subsystem_count(); ++k) {
    if (k == idx) continue;
    keep.push_back(k);
    qd.push_back(rho.dims()[k]);
    ql.push_back(rho.labels()[k]);
  }
  std::vector<CMatrix> blocks;
  for (const auto& p : pvm.projectors()) {
    const CMatrix pe = embed(p, rho.dims(), idx);
    // Tr_A{(P (x) I) rho} = Tr_A{(P (x) I) rho (P (x) I)} for a projector
    const CMatrix post = pe * rho.matrix() * pe;
    if (keep.empty()) {
      blocks.push_back(CMatrix::Constant(1, 1, post.trace()));
    } else {
      blocks.push_back(partial_trace(post, rho.dims(), keep));
    }
  }
  if (qd.empty()) {
    qd.push_back(1);
    ql.push_back("1");
  }
  return CqState(std::move(blocks), std::move(qd), std::move(ql), std::move(register_label));
}

/// Outcome-discarding measurement sum_k P^k rho P^k on `measured`.
inline DensityOperator pinch(const DensityOperator& rho, const Pvm& pvm,
                             std::string_view measured) {
  const std::size_t idx = rho.index_of(measured);
  require_pvm_fits(rho, pvm, idx, "pinch");
  CMatrix out = CMatrix::Zero(rho.matrix().rows(), rho.matrix().cols());
  for (const auto& p : pvm.projectors()) {
    const CMatrix pe = embed(p, rho.dims(), idx);
    out += pe * rho.matrix() * pe;
  }
  return DensityOperator(std::move(out), rho.dims(), rho.labels(), 1e-8);
}

/// State after measuring Z, then X, on `measured` and forgetting the Z
/// outcome: block x is theta^x = sum_z <z|P^x|z> omega^z with
/// omega^z = <z| rho |z>.
inline CqState theta_state(const DensityOperator& rho, const Pvm& x_pvm,
                           const Pvm& z_pvm, std::string_view measured = "A",
                           std::string register_label = "X") {
  require_rank_one(z_pvm, "theta_state");
  const CqState omega = measure(rho, z_pvm, measured, "Z");
  if (x_pvm.dim() != z_pvm.dim()) {
    throw DimensionError("theta_state: X and Z measurements act on different dimensions");
  }
  std::vector<CMatrix> blocks;
  for (std::size_t x = 0; x < x_pvm.size(); ++x) {
    CMatrix acc = CMatrix::Zero(omega.block(0).rows(), omega.block(0).cols());
    for (std::size_t z = 0; z < z_pvm.size(); ++z) {
      const CVector v = z_pvm.basis_vector(z);
      const Complex w = v.dot(x_pvm[x] * v);  // <z|P^x|z>
      acc += w.real() * omega.block(z);
    }
    blocks.push_back(std::move(acc));
  }
  return CqState(std::move(blocks), omega.quantum_dims(), omega.quantum_labels(),
                 std::move(register_label));
}

/// c = max_{x,z} ||P^x Q^z||_inf^2.
inline double incompatibility_c(const Pvm& x_pvm, const Pvm& z_pvm) {
  if (x_pvm.dim() != z_pvm.dim()) {
    throw DimensionError("incompatibility_c: measurements act on different dimensions");
  }
  double c = 0.0;
  for (const auto& p : x_pvm.projectors()) {
    for (const auto& q : z_pvm.projectors()) {
      const double n = op_norm(p * q);
      c = std::max(c, n * n);
    }
  }
  return std::min(c, 1.0);
}

/// Isometry U = sum_x |x>_X (x) |x>_X' (x) P^x from A to X X' A.
inline CMatrix isometric_extension(const Pvm& pvm) {
  const std::size_t n = pvm.size();
  const std::size_t d = pvm.dim();
  CMatrix u = CMatrix::Zero(static_cast<Eigen::Index>(n * n * d),
                            static_cast<Eigen::Index>(d));
  for (std::size_t x = 0; x < n; ++x) {
    const CVector xx = tensor(ket(n, x), ket(n, x));
    u += tensor(CMatrix(xx), pvm[x]);
  }
  return u;
}

/// Purification |psi> = sum_i sqrt(lambda_i) |v_i> (x) |i>_R over the support
/// of rho; the purifying register has dimension rank(rho).
inline CVector purify_vector(const DensityOperator& rho) {
  const HermEig eig = herm_eig(rho.matrix());
  const double cut = support_threshold(eig);
  std::size_t rank = 0;
  while (rank < static_cast<std::size_t>(eig.values.size()) &&
         eig.values(static_cast<Eigen::Index>(rank)) > cut) {
    ++rank;
  }
  CVector psi = CVector::Zero(static_cast<Eigen::Index>(rho.dim() * rank));
  for (std::size_t i = 0; i < rank; ++i) {
    psi += std::sqrt(eig.values(static_cast<Eigen::Index>(i))) *
           tensor(CVector(eig.vectors.col(static_cast<Eigen::Index>(i))), ket(rank, i));
  }
  return psi;
}

inline DensityOperator purify(const DensityOperator& rho, std::string purifier_label = "R") {
  const CVector psi = purify_vector(rho);
  Dims dims = rho.dims();
  dims.push_back(static_cast<std::size_t>(psi.size()) / rho.dim());
  Labels labels = rho.labels();
  labels.push_back(std::move(purifier_label));
  return DensityOperator(projector(psi), std::move(dims), std::move(labels), 1e-8);
}

// ---------------------------------------------------------------------------
// Seeded random ensembles

inline CMatrix gaussian_matrix(std::size_t rows, std::size_t cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index j = 0; j < g.cols(); ++j) {
    for (Eigen::Index i = 0; i < g.rows(); ++i) {
      const double re = normal(rng);
      const double im = normal(rng);
      g(i, j) = Complex(re, im);
    }
  }
  return g;
}

/// Haar-random unitary: QR of a Ginibre matrix with the phases of R's
/// diagonal absorbed into Q.
inline CMatrix random_unitary(std::size_t dim, std::mt19937_64& rng) {
  const CMatrix g = gaussian_matrix(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < q.cols(); ++k) {
    const double a = std::abs(r(k, k));
    if (a > 0.0) q.col(k) *= r(k, k) / a;
  }
  return q;
}

/// Random state of the given rank: partial trace of a Gaussian pure state on
/// (prod dims) x rank.
inline DensityOperator random_state(const Dims& dims, std::size_t rank, std::uint64_t seed,
                                    Labels labels = {}) {
  const std::size_t dim = product(dims);
  if (rank < 1 || rank > dim) {
    throw std::invalid_argument("random_state: rank must lie in [1, dim]");
  }
  if (labels.empty()) labels = default_labels(dims.size());
  std::mt19937_64 rng(seed);
  const CMatrix g = gaussian_matrix(dim, rank, rng);
  CMatrix rho = g * g.adjoint();
  rho /= real_trace(rho);
  return DensityOperator(0.5 * (rho + rho.adjoint()), dims, std::move(labels));
}

inline DensityOperator random_state(std::size_t dim, std::size_t rank, std::uint64_t seed) {
  return random_state(Dims{dim}, rank, seed);
}

/// Rank-one PVM in a Haar-random orthonormal basis.
inline Pvm random_pvm(std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Pvm::from_basis(random_unitary(dim, rng));
}

}  // namespace eurqsi
