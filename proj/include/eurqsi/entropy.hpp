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

// Entropic functionals in bits.

#pragma once

#include <cmath>
#include <limits>
#include <ostream>

#include "eurqsi/qmat.hpp"
#include "eurqsi/qstate.hpp"

namespace eurqsi {

/// A value in bits, or +infinity (relative entropy with a support
/// violation).
class EntropyValue {
 public:
  static EntropyValue bits(double v) { return EntropyValue(v, false); }
  static EntropyValue infinity() { return EntropyValue(0.0, true); }

  bool is_infinite() const { return infinite_; }
  bool is_finite() const { return !infinite_; }

  double value() const {
    if (infinite_) throw std::logic_error("EntropyValue: value is +infinity");
    return value_;
  }

  /// The value as a double, +inf when infinite.
  double as_double() const {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  friend std::ostream& operator<<(std::ostream& os, const EntropyValue& e) {
    if (e.infinite_) return os << "+inf";
    return os << e.value_;
  }

 private:
  EntropyValue(double v, bool inf) : value_(v), infinite_(inf) {}
  double value_;
  bool infinite_;
};

/// -sum lambda log2 lambda over the support of a PSD matrix.
inline double spectral_entropy(const HermEig& eig) {
  const double cut = support_threshold(eig);
  double h = 0.0;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double l = eig.values(k);
    if (l > cut && l > 0.0) h -= l * std::log2(l);
  }
  return h;
}

inline double von_neumann(const CMatrix& rho) { return spectral_entropy(herm_eig(rho)); }

inline double von_neumann(const DensityOperator& rho) { return von_neumann(rho.matrix()); }

/// H(rest | cond) = H(all) - H(cond). `cond` may be empty but must not name
/// every subsystem.
inline double conditional(const DensityOperator& rho, const Labels& cond) {
  for (const auto& l : cond) rho.index_of(l);
  if (rho.complement(cond).empty()) {
    throw DimensionError("conditional: conditioning labels must be a proper subset");
  }
  const double joint = von_neumann(rho);
  if (cond.empty()) return joint;
  return joint - von_neumann(rho.reduced(cond));
}

/// Support-violation weight above which D(rho||sigma) is reported as +inf.
inline constexpr double kSupportViolation = kSupportCutoff;

/// D(rho||sigma) = Tr rho (log2 rho - log2 sigma) for a state rho and a PSD
/// (not necessarily normalised) sigma. Tr rho log2 sigma is evaluated in
/// sigma's eigenbasis through the overlaps |<u_i|v_j>|^2 with rho's
/// eigenvectors.
inline EntropyValue relative(const CMatrix& rho, const CMatrix& sigma) {
  require_square(rho, "relative");
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw DimensionError("relative: dimension mismatch");
  }
  if (!is_hermitian(sigma)) throw InvariantError("relative: sigma is not Hermitian");
  const HermEig re = herm_eig(rho);
  const HermEig se = herm_eig(sigma);
  require_psd(se, "relative (sigma)");
  const double rcut = support_threshold(re);
  const double scut = support_threshold(se);

  // overlap(i, j) = |<u_i|v_j>|^2
  const Eigen::MatrixXd overlap = (re.vectors.adjoint() * se.vectors).cwiseAbs2();

  double rho_log_rho = 0.0;
  double rho_log_sigma = 0.0;
  double violation = 0.0;
  for (Eigen::Index i = 0; i < re.values.size(); ++i) {
    const double l = re.values(i);
    if (!(l > rcut && l > 0.0)) continue;
    rho_log_rho += l * std::log2(l);
    for (Eigen::Index j = 0; j < se.values.size(); ++j) {
      const double m = se.values(j);
      if (m > scut && m > 0.0) {
        rho_log_sigma += l * overlap(i, j) * std::log2(m);
      } else {
        violation += l * overlap(i, j);
      }
    }
  }
  if (violation > kSupportViolation) return EntropyValue::infinity();
  return EntropyValue::bits(rho_log_rho - rho_log_sigma);
}

inline EntropyValue relative(const DensityOperator& rho, const CMatrix& sigma) {
  return relative(rho.matrix(), sigma);
}

}  // namespace eurqsi
