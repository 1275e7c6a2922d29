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

// Dense complex linear algebra for small density-matrix computations.
//
// Tensor-factor convention used everywhere in eurqsi: subsystem 0 is the
// slowest-varying factor, i.e. the index of |i_0 i_1 ... i_{n-1}> is
// i_0 * (d_1 ... d_{n-1}) + ... + i_{n-1}. tensor(a, b) puts `a` on
// subsystem 0.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace eurqsi {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using Dims = std::vector<std::size_t>;

/// Raised when operand shapes or subsystem bookkeeping do not line up.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a value violates a mathematical invariant (not Hermitian,
/// not a projector, negative eigenvalue, ...). The message names the
/// violated invariant.
class InvariantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigenvalues at or below this fraction of the largest eigenvalue are
/// treated as exact zeros.
inline constexpr double kSupportCutoff = 1e-10;

/// Absolute tolerance for Hermiticity and positivity checks.
inline constexpr double kHermitianTolerance = 1e-10;

inline std::size_t product(const Dims& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                         std::multiplies<>());
}

inline CMatrix identity(std::size_t d) {
  return CMatrix::Identity(static_cast<Eigen::Index>(d),
                           static_cast<Eigen::Index>(d));
}

inline CVector ket(std::size_t d, std::size_t i) {
  CVector v = CVector::Zero(static_cast<Eigen::Index>(d));
  v(static_cast<Eigen::Index>(i)) = 1.0;
  return v;
}

inline CMatrix outer(const CVector& a, const CVector& b) {
  return a * b.adjoint();
}

inline CMatrix projector(const CVector& v) { return v * v.adjoint(); }

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline bool all_finite(const CMatrix& m) {
  return m.allFinite();
}

inline bool is_hermitian(const CMatrix& m, double tol = kHermitianTolerance) {
  if (m.rows() != m.cols()) return false;
  return max_abs(m - m.adjoint()) <= tol * std::max(1.0, max_abs(m));
}

inline void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(std::string(what) + ": matrix is not square (" +
                         std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ")");
  }
}

// ---------------------------------------------------------------------------
// Hermitian eigendecomposition

/// Spectral decomposition M = V diag(values) V^dagger, eigenvalues in
/// descending order.
struct HermEig {
  RVector values;
  CMatrix vectors;

  CMatrix reconstruct() const {
    return vectors * values.cast<Complex>().asDiagonal() * vectors.adjoint();
  }
  double max_value() const { return values.size() ? values(0) : 0.0; }
  double min_value() const {
    return values.size() ? values(values.size() - 1) : 0.0;
  }
};

/// Eigendecomposition of the Hermitian part of `m` (tridiagonalization + QL,
/// via Eigen's self-adjoint solver).
inline HermEig herm_eig(const CMatrix& m) {
  require_square(m, "herm_eig");
  const CMatrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("herm_eig: eigensolver did not converge");
  }
  const Eigen::Index n = h.rows();
  HermEig out{RVector(n), CMatrix(n, n)};
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = solver.eigenvalues()(n - 1 - k);
    out.vectors.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return out;
}

/// Applies `f` to the spectrum of a Hermitian matrix.
template <typename F>
CMatrix herm_function(const HermEig& eig, F&& f) {
  CVector mapped(eig.values.size());
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    mapped(k) = f(eig.values(k));
  }
  return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

/// Threshold separating support from kernel for a PSD spectrum.
inline double support_threshold(const HermEig& eig) {
  return kSupportCutoff * std::max(eig.max_value(), 0.0);
}

inline void require_psd(const HermEig& eig, const char* what) {
  const double scale = std::max(1.0, std::abs(eig.max_value()));
  if (eig.min_value() < -kHermitianTolerance * scale) {
    throw InvariantError(std::string(what) +
                         ": matrix is not positive semidefinite (eigenvalue " +
                         std::to_string(eig.min_value()) + ")");
  }
}

/// lambda^z for eigenvalues above `floor`, zero elsewhere.
inline CMatrix power_on_support(const HermEig& eig, Complex z, double floor) {
  return herm_function(eig, [&](double lambda) -> Complex {
    if (lambda <= floor || lambda <= 0.0) return 0.0;
    return std::exp(z * std::log(lambda));
  });
}

/// Support-restricted matrix power of a PSD matrix. Eigenvalues above
/// kSupportCutoff times the largest eigenvalue (or above `floor`, when
/// given) map to lambda^z, the rest to zero, so negative real parts give
/// pseudo-inverse powers.
inline CMatrix mat_power_on_support(const CMatrix& m, Complex z,
                                    std::optional<double> floor = {}) {
  require_square(m, "mat_power_on_support");
  if (!is_hermitian(m)) {
    throw InvariantError("mat_power_on_support: matrix is not Hermitian");
  }
  const HermEig eig = herm_eig(m);
  require_psd(eig, "mat_power_on_support");
  return power_on_support(eig, z, floor.value_or(support_threshold(eig)));
}

/// Orthogonal projector onto the support of a PSD matrix.
inline CMatrix support_projector(const CMatrix& m,
                                 std::optional<double> floor = {}) {
  const HermEig eig = herm_eig(m);
  const double cut = floor.value_or(support_threshold(eig));
  return herm_function(eig, [&](double lambda) -> Complex {
    return lambda > cut && lambda > 0.0 ? 1.0 : 0.0;
  });
}

// ---------------------------------------------------------------------------
// Tensor algebra

/// Kronecker product; `a` is the slow (first) factor.
inline CMatrix tensor(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CMatrix tensor(std::initializer_list<CMatrix> factors) {
  CMatrix out = CMatrix::Ones(1, 1);
  for (const auto& f : factors) out = tensor(out, f);
  return out;
}

inline CVector tensor(const CVector& a, const CVector& b) {
  return tensor(CMatrix(a), CMatrix(b)).col(0);
}

/// Digits of a flat index in the mixed radix given by `dims`.
inline std::vector<std::size_t> unflatten(std::size_t index, const Dims& dims) {
  std::vector<std::size_t> digits(dims.size());
  for (std::size_t k = dims.size(); k-- > 0;) {
    digits[k] = index % dims[k];
    index /= dims[k];
  }
  return digits;
}

inline std::size_t flatten(const std::vector<std::size_t>& digits,
                           const Dims& dims) {
  std::size_t index = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) index = index * dims[k] + digits[k];
  return index;
}

/// Partial trace keeping the listed subsystems. The kept subsystems appear
/// in ascending index order in the result, whatever the order of `keep`.
inline CMatrix partial_trace(const CMatrix& m, const Dims& dims,
                             std::vector<std::size_t> keep) {
  require_square(m, "partial_trace");
  const std::size_t total = product(dims);
  if (total != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("partial_trace: subsystem dimensions multiply to " +
                         std::to_string(total) + " but matrix has dimension " +
                         std::to_string(m.rows()));
  }
  std::sort(keep.begin(), keep.end());
  keep.erase(std::unique(keep.begin(), keep.end()), keep.end());
  for (auto k : keep) {
    if (k >= dims.size()) {
      throw DimensionError("partial_trace: subsystem index " +
                           std::to_string(k) + " out of range");
    }
  }
  std::vector<bool> kept(dims.size(), false);
  Dims kdims, tdims;
  for (auto k : keep) kept[k] = true;
  for (std::size_t k = 0; k < dims.size(); ++k) {
    (kept[k] ? kdims : tdims).push_back(dims[k]);
  }
  const std::size_t dk = product(kdims);
  const std::size_t dt = product(tdims);

  // full index of (kept index, traced index)
  std::vector<Eigen::Index> full(dk * dt);
  for (std::size_t i = 0; i < total; ++i) {
    const auto digits = unflatten(i, dims);
    std::vector<std::size_t> kd, td;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      (kept[k] ? kd : td).push_back(digits[k]);
    }
    full[flatten(kd, kdims) * dt + flatten(td, tdims)] =
        static_cast<Eigen::Index>(i);
  }

  CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(dk),
                              static_cast<Eigen::Index>(dk));
  for (std::size_t r = 0; r < dk; ++r) {
    for (std::size_t c = 0; c < dk; ++c) {
      Complex acc = 0.0;
      for (std::size_t t = 0; t < dt; ++t) {
        acc += m(full[r * dt + t], full[c * dt + t]);
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return out;
}

/// Reorders tensor factors: factor j of the result is factor perm[j] of `m`.
inline CMatrix permute_subsystems(const CMatrix& m, const Dims& dims,
                                  const std::vector<std::size_t>& perm) {
  require_square(m, "permute_subsystems");
  if (perm.size() != dims.size() || product(dims) != static_cast<std::size_t>(m.rows())) {
    throw DimensionError("permute_subsystems: permutation does not match dims");
  }
  std::vector<bool> seen(dims.size(), false);
  Dims new_dims(dims.size());
  for (std::size_t j = 0; j < perm.size(); ++j) {
    if (perm[j] >= dims.size() || seen[perm[j]]) {
      throw DimensionError("permute_subsystems: not a permutation");
    }
    seen[perm[j]] = true;
    new_dims[j] = dims[perm[j]];
  }
  const std::size_t n = product(dims);
  std::vector<Eigen::Index> map(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto digits = unflatten(i, dims);
    std::vector<std::size_t> nd(dims.size());
    for (std::size_t j = 0; j < perm.size(); ++j) nd[j] = digits[perm[j]];
    map[i] = static_cast<Eigen::Index>(flatten(nd, new_dims));
  }
  CMatrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      out(map[r], map[c]) =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
    }
  }
  return out;
}

/// Embeds an operator acting on subsystem `index` into the full space.
inline CMatrix embed(const CMatrix& op, const Dims& dims, std::size_t index) {
  if (index >= dims.size() || static_cast<std::size_t>(op.rows()) != dims[index] ||
      op.rows() != op.cols()) {
    throw DimensionError("embed: operator does not fit subsystem " +
                         std::to_string(index));
  }
  std::size_t before = 1, after = 1;
  for (std::size_t k = 0; k < index; ++k) before *= dims[k];
  for (std::size_t k = index + 1; k < dims.size(); ++k) after *= dims[k];
  return tensor({identity(before), op, identity(after)});
}

// ---------------------------------------------------------------------------
// Norms and distances

/// Largest singular value.
inline double op_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues()(0);
}

inline double trace_norm(const CMatrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMatrix> svd(m);
  return svd.singularValues().sum();
}

/// Half the trace norm of the difference.
inline double trace_distance(const CMatrix& a, const CMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw DimensionError("trace_distance: shape mismatch");
  }
  return 0.5 * trace_norm(a - b);
}

inline double real_trace(const CMatrix& m) { return m.trace().real(); }

/// Checks the density-operator invariants to tolerance `tol`; throws
/// InvariantError naming the first one that fails.
inline void require_state(const CMatrix& m, double tol, const char* what) {
  require_square(m, what);
  if (!all_finite(m)) {
    throw InvariantError(std::string(what) + ": non-finite entry");
  }
  if (!is_hermitian(m, tol)) {
    throw InvariantError(std::string(what) + ": matrix is not Hermitian");
  }
  const double tr = real_trace(m);
  if (std::abs(tr - 1.0) > tol) {
    throw InvariantError(std::string(what) + ": trace is " +
                         std::to_string(tr) + ", expected 1");
  }
  const HermEig eig = herm_eig(m);
  if (eig.min_value() < -tol) {
    throw InvariantError(std::string(what) +
                         ": matrix is not positive semidefinite (eigenvalue " +
                         std::to_string(eig.min_value()) + ")");
  }
}

/// Values of the fidelity within this distance outside [0, 1] are clipped;
/// anything further out is reported as an error.
inline constexpr double kFidelityGuardBand = 1e-9;

/// Squared fidelity F = ||sqrt(rho) sqrt(sigma)||_1^2. The eigenvalues of
/// sqrt(rho) sigma sqrt(rho) are taken as the squared singular values of
/// sqrt(sigma) sqrt(rho), which keeps near-zero eigenvalues at round-off
/// size instead of their square roots.
inline double fidelity(const CMatrix& rho, const CMatrix& sigma,
                       double state_tol = 1e-9) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("fidelity: dimension mismatch");
  }
  require_state(rho, state_tol, "fidelity (first argument)");
  require_state(sigma, state_tol, "fidelity (second argument)");
  // eigenvalues at round-off level are zeros, not sqrt(1e-16)-sized weights
  const auto root = [](const CMatrix& m) {
    const HermEig eig = herm_eig(m);
    const double cut = 1e-14 * std::max(eig.max_value(), 0.0);
    return herm_function(eig, [cut](double l) -> Complex {
      return l > cut ? std::sqrt(l) : 0.0;
    });
  };
  Eigen::JacobiSVD<CMatrix> svd(root(sigma) * root(rho));
  const double sum = svd.singularValues().sum();
  const double f = sum * sum;
  if (f > 1.0 + kFidelityGuardBand) {
    throw InvariantError("fidelity: value " + std::to_string(f) +
                         " exceeds 1 beyond the guard band");
  }
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace eurqsi
