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

// Completely positive maps and the recovery channels built from them:
// the Petz map, its rotated (time-averaged) variant, and the closed-form
// map that reverses an X measurement given the B system.
//
// Choi convention: J = sum_ij |i><j| (x) N(|i><j|), input factor first, so
// J[i*d_out + o, j*d_out + p] = <o|N(|i><j|)|p>.

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "eurqsi/qmat.hpp"
#include "eurqsi/qstate.hpp"
#include "eurqsi/quadrature.hpp"

namespace eurqsi {

namespace detail {

/// Column i*d_out + o of the Choi "vectorisation" of K.
inline CVector choi_vec(const CMatrix& k) {
  const Eigen::Index dout = k.rows();
  CVector v(k.rows() * k.cols());
  for (Eigen::Index i = 0; i < k.cols(); ++i) {
    for (Eigen::Index o = 0; o < dout; ++o) v(i * dout + o) = k(o, i);
  }
  return v;
}

inline CMatrix choi_from_kraus(const std::vector<CMatrix>& kraus, std::size_t din,
                               std::size_t dout) {
  const auto n = static_cast<Eigen::Index>(din * dout);
  CMatrix stacked(n, static_cast<Eigen::Index>(kraus.size()));
  for (std::size_t k = 0; k < kraus.size(); ++k) {
    if (static_cast<std::size_t>(kraus[k].rows()) != dout ||
        static_cast<std::size_t>(kraus[k].cols()) != din) {
      throw DimensionError("CpMap: Kraus operator " + std::to_string(k) +
                           " has the wrong shape");
    }
    stacked.col(static_cast<Eigen::Index>(k)) = choi_vec(kraus[k]);
  }
  if (kraus.empty()) return CMatrix::Zero(n, n);
  return stacked * stacked.adjoint();
}

}  // namespace detail

/// Relative eigenvalue cutoff used when reading Kraus operators off a Choi
/// matrix.
inline constexpr double kKrausCutoff = 1e-14;

/// Minimal Kraus set from the spectral decomposition of a Choi matrix.
inline std::vector<CMatrix> kraus_from_choi(const CMatrix& choi, std::size_t din,
                                            std::size_t dout) {
  const HermEig eig = herm_eig(choi);
  const double cut = kKrausCutoff * std::max(eig.max_value(), 0.0);
  std::vector<CMatrix> out;
  for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
    const double l = eig.values(k);
    if (!(l > cut && l > 0.0)) break;
    const CVector v = std::sqrt(l) * eig.vectors.col(k);
    CMatrix kr(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(din));
    for (std::size_t i = 0; i < din; ++i) {
      for (std::size_t o = 0; o < dout; ++o) {
        kr(static_cast<Eigen::Index>(o), static_cast<Eigen::Index>(i)) =
            v(static_cast<Eigen::Index>(i * dout + o));
      }
    }
    out.push_back(std::move(kr));
  }
  return out;
}

/// Completely positive map with Choi matrix and (optionally) Kraus
/// operators. `support` is the input subspace on which the map is declared
/// trace preserving; absent means everywhere.
class CpMap {
 public:
  static CpMap from_kraus(std::vector<CMatrix> kraus, Dims in_dims, Dims out_dims) {
    CpMap m;
    m.in_dims_ = std::move(in_dims);
    m.out_dims_ = std::move(out_dims);
    m.choi_ = detail::choi_from_kraus(kraus, m.in_dim(), m.out_dim());
    m.kraus_ = std::move(kraus);
    return m;
  }

  /// Takes the Choi matrix as given and derives a minimal Kraus set from it.
  static CpMap from_choi(CMatrix choi, Dims in_dims, Dims out_dims) {
    CpMap m;
    m.in_dims_ = std::move(in_dims);
    m.out_dims_ = std::move(out_dims);
    if (static_cast<std::size_t>(choi.rows()) != m.in_dim() * m.out_dim() ||
        choi.rows() != choi.cols()) {
      throw DimensionError("CpMap: Choi matrix has the wrong dimension");
    }
    m.choi_ = 0.5 * (choi + choi.adjoint());
    m.kraus_ = kraus_from_choi(m.choi_, m.in_dim(), m.out_dim());
    return m;
  }

  static CpMap identity(Dims dims) {
    const std::size_t d = product(dims);
    return from_kraus({eurqsi::identity(d)}, dims, dims);
  }

  const CMatrix& choi() const { return choi_; }
  const std::optional<std::vector<CMatrix>>& kraus() const { return kraus_; }
  const Dims& in_dims() const { return in_dims_; }
  const Dims& out_dims() const { return out_dims_; }
  std::size_t in_dim() const { return product(in_dims_); }
  std::size_t out_dim() const { return product(out_dims_); }

  const std::optional<CMatrix>& support() const { return support_; }
  CpMap& with_support(CMatrix projector) {
    support_ = std::move(projector);
    return *this;
  }

  std::vector<CMatrix> kraus_or_derived() const {
    return kraus_ ? *kraus_ : kraus_from_choi(choi_, in_dim(), out_dim());
  }

  CMatrix apply(const CMatrix& x) const {
    if (static_cast<std::size_t>(x.rows()) != in_dim() || x.rows() != x.cols()) {
      throw DimensionError("CpMap::apply: input has dimension " + std::to_string(x.rows()) +
                           ", map expects " + std::to_string(in_dim()));
    }
    const auto dout = static_cast<Eigen::Index>(out_dim());
    CMatrix out = CMatrix::Zero(dout, dout);
    if (kraus_) {
      for (const auto& k : *kraus_) out += k * x * k.adjoint();
      return out;
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      for (Eigen::Index j = 0; j < x.cols(); ++j) {
        if (x(i, j) != Complex(0.0)) {
          out += x(i, j) * choi_.block(i * dout, j * dout, dout, dout);
        }
      }
    }
    return out;
  }

  /// Hilbert-Schmidt adjoint N^dagger(y) = sum_k K^dagger y K.
  CMatrix apply_adjoint(const CMatrix& y) const {
    if (static_cast<std::size_t>(y.rows()) != out_dim() || y.rows() != y.cols()) {
      throw DimensionError("CpMap::apply_adjoint: dimension mismatch");
    }
    const auto din = static_cast<Eigen::Index>(in_dim());
    CMatrix out = CMatrix::Zero(din, din);
    for (const auto& k : kraus_or_derived()) out += k.adjoint() * y * k;
    return out;
  }

  /// This map on the first factors, identity on an extra trailing factor of
  /// dimension d.
  CpMap tensor_identity(std::size_t d) const {
    std::vector<CMatrix> ks;
    for (const auto& k : kraus_or_derived()) ks.push_back(tensor(k, eurqsi::identity(d)));
    Dims in = in_dims_, out = out_dims_;
    in.push_back(d);
    out.push_back(d);
    return from_kraus(std::move(ks), std::move(in), std::move(out));
  }

  /// sum_k K^dagger K, read off the Choi matrix: (Tr_out J)^T.
  CMatrix kraus_completeness() const {
    const Dims dims{in_dim(), out_dim()};
    return partial_trace(choi_, dims, {0}).transpose();
  }

 private:
  CpMap() = default;
  CMatrix choi_;
  std::optional<std::vector<CMatrix>> kraus_;
  Dims in_dims_;
  Dims out_dims_;
  std::optional<CMatrix> support_;
};

/// Operator-norm distance between Choi matrices.
inline double choi_distance(const CpMap& a, const CpMap& b) {
  if (a.in_dim() != b.in_dim() || a.out_dim() != b.out_dim()) {
    throw DimensionError("choi_distance: maps have different shapes");
  }
  return op_norm(a.choi() - b.choi());
}

/// Measurement channel A -> X, rho -> sum_x Tr{P^x rho} |x><x|, with Kraus
/// operators |x><e| for e an orthonormal basis of range(P^x).
inline CpMap measurement_channel(const Pvm& pvm) {
  const std::size_t n = pvm.size();
  std::vector<CMatrix> ks;
  for (std::size_t x = 0; x < n; ++x) {
    const HermEig eig = herm_eig(pvm[x]);
    for (Eigen::Index k = 0; k < eig.values.size(); ++k) {
      if (eig.values(k) > 0.5) ks.push_back(outer(ket(n, x), eig.vectors.col(k)));
    }
  }
  return CpMap::from_kraus(std::move(ks), Dims{pvm.dim()}, Dims{n});
}

inline CMatrix apply(const CpMap& map, const CMatrix& x) { return map.apply(x); }

/// Applies the map to a state; output labels default to A, B, ...
inline DensityOperator apply(const CpMap& map, const DensityOperator& rho, Labels labels = {}) {
  if (labels.empty()) labels = default_labels(map.out_dims().size());
  return DensityOperator(map.apply(rho.matrix()), map.out_dims(), std::move(labels), 1e-8);
}

inline DensityOperator apply(const CpMap& map, const CqState& cq, Labels labels = {}) {
  return apply(map, cq.to_density(), std::move(labels));
}

// ---------------------------------------------------------------------------
// Verification

struct CptpReport {
  double choi_min_eigenvalue = 0.0;   // relative to the largest eigenvalue
  double kraus_choi_residual = 0.0;   // ||J(Kraus) - J||_max, 0 without Kraus
  double trace_residual = 0.0;        // ||P (sum K^dag K) P - P||_max
  double tolerance = 1e-8;
  bool choi_psd = false;
  bool kraus_consistent = false;
  bool trace_preserving = false;

  bool passed() const { return choi_psd && kraus_consistent && trace_preserving; }
};

/// Checks complete positivity and trace preservation on the subspace with
/// projector `support` (pass the identity for global trace preservation).
inline CptpReport verify_cptp(const CpMap& map, const CMatrix& support, double tol = 1e-8) {
  if (static_cast<std::size_t>(support.rows()) != map.in_dim()) {
    throw DimensionError("verify_cptp: support projector has the wrong dimension");
  }
  CptpReport r;
  r.tolerance = tol;
  const HermEig eig = herm_eig(map.choi());
  const double scale = std::max(1.0, eig.max_value());
  r.choi_min_eigenvalue = eig.min_value() / scale;
  r.choi_psd = r.choi_min_eigenvalue >= -tol;
  if (map.kraus()) {
    r.kraus_choi_residual =
        max_abs(detail::choi_from_kraus(*map.kraus(), map.in_dim(), map.out_dim()) - map.choi());
  }
  r.kraus_consistent = r.kraus_choi_residual <= tol;
  const CMatrix completeness = map.kraus_completeness();
  r.trace_residual = max_abs(support * completeness * support - support);
  r.trace_preserving = r.trace_residual <= tol;
  return r;
}

inline CptpReport verify_cptp(const CpMap& map, double tol = 1e-8) {
  return verify_cptp(map, identity(map.in_dim()), tol);
}

// ---------------------------------------------------------------------------
// Recovery maps

struct RecoveryOptions {
  /// Route the complement of the declared support to the reference state so
  /// that the map is trace preserving everywhere.
  bool complete = true;
  /// Reject quadratures whose weights do not integrate p(t) to 1.
  bool check_quadrature = true;
};

namespace detail {

/// Kraus operators sqrt(t_j) |t_j><e_k| sending the complement of
/// `support` to the state `reference`.
inline std::vector<CMatrix> completion_kraus(const CMatrix& support, const CMatrix& reference) {
  std::vector<CMatrix> out;
  const HermEig comp = herm_eig(identity(static_cast<std::size_t>(support.rows())) - support);
  const HermEig ref = herm_eig(reference / real_trace(reference));
  for (Eigen::Index k = 0; k < comp.values.size(); ++k) {
    if (comp.values(k) < 0.5) continue;
    for (Eigen::Index j = 0; j < ref.values.size(); ++j) {
      if (ref.values(j) <= support_threshold(ref)) continue;
      out.push_back(std::sqrt(ref.values(j)) * outer(ref.vectors.col(j), comp.vectors.col(k)));
    }
  }
  return out;
}

/// Builds the map from a Kraus list, replacing it with the minimal Kraus
/// set of its Choi matrix.
inline CpMap compressed(const std::vector<CMatrix>& kraus, const Dims& in, const Dims& out) {
  return CpMap::from_choi(choi_from_kraus(kraus, product(in), product(out)), in, out);
}

}  // namespace detail

/// Petz map R(Y) = sigma^{1/2} N^dagger(N(sigma)^{-1/2} Y N(sigma)^{-1/2}) sigma^{1/2},
/// as Kraus operators sigma^{1/2} K^dagger N(sigma)^{-1/2}. Declared support:
/// supp N(sigma).
inline CpMap petz_map(const CMatrix& sigma, const CpMap& channel, RecoveryOptions opts = {}) {
  if (static_cast<std::size_t>(sigma.rows()) != channel.in_dim()) {
    throw DimensionError("petz_map: sigma does not match the channel input");
  }
  const CMatrix n_sigma = channel.apply(sigma);
  const CMatrix s_half = mat_power_on_support(sigma, 0.5);
  const CMatrix n_mhalf = mat_power_on_support(n_sigma, -0.5);
  std::vector<CMatrix> ks;
  for (const auto& k : channel.kraus_or_derived()) ks.push_back(s_half * k.adjoint() * n_mhalf);
  const CMatrix support = support_projector(n_sigma);
  if (opts.complete) {
    for (auto& k : detail::completion_kraus(support, sigma)) ks.push_back(std::move(k));
  }
  CpMap m = detail::compressed(ks, channel.out_dims(), channel.in_dims());
  m.with_support(support);
  return m;
}

/// Rotated Petz map
///   R(Y) = int dt p(t) sigma^{-it/2} R_petz(N(sigma)^{it/2} Y N(sigma)^{-it/2}) sigma^{it/2},
/// discretised by `quad`. Per node the Kraus operators are
/// sqrt(w) sigma^{(1-it)/2} K^dagger N(sigma)^{(-1+it)/2}.
inline CpMap rotated_petz_map(const CMatrix& sigma, const CpMap& channel, const Quadrature& quad,
                              RecoveryOptions opts = {}) {
  if (opts.check_quadrature) quad.validate();
  if (static_cast<std::size_t>(sigma.rows()) != channel.in_dim()) {
    throw DimensionError("rotated_petz_map: sigma does not match the channel input");
  }
  if (!is_hermitian(sigma)) throw InvariantError("rotated_petz_map: sigma is not Hermitian");
  const HermEig se = herm_eig(sigma);
  require_psd(se, "rotated_petz_map (sigma)");
  const CMatrix n_sigma = channel.apply(sigma);
  const HermEig ne = herm_eig(n_sigma);
  const double sfloor = support_threshold(se);
  const double nfloor = support_threshold(ne);
  const auto kraus = channel.kraus_or_derived();

  const std::size_t din = channel.out_dim();  // recovery input
  const std::size_t dout = channel.in_dim();
  const auto n = static_cast<Eigen::Index>(din * dout);
  CMatrix choi = CMatrix::Zero(n, n);
  CMatrix stacked(n, static_cast<Eigen::Index>(kraus.size()));
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double t = quad.nodes[q];
    const CMatrix left = power_on_support(se, Complex(0.5, -0.5 * t), sfloor);
    const CMatrix right = power_on_support(ne, Complex(-0.5, 0.5 * t), nfloor);
    const double sw = std::sqrt(quad.weights[q]);
    for (std::size_t k = 0; k < kraus.size(); ++k) {
      stacked.col(static_cast<Eigen::Index>(k)) =
          detail::choi_vec(sw * left * kraus[k].adjoint() * right);
    }
    choi.noalias() += stacked * stacked.adjoint();
  }
  const CMatrix support = support_projector(n_sigma);
  if (opts.complete) {
    const auto extra = detail::completion_kraus(support, sigma);
    choi += detail::choi_from_kraus(extra, din, dout);
  }
  CpMap m = CpMap::from_choi(std::move(choi), channel.out_dims(), channel.in_dims());
  m.with_support(support);
  return m;
}

namespace detail {

/// rho with subsystem A moved to the front; B is everything else.
inline DensityOperator a_first(const DensityOperator& rho) {
  Labels order{"A"};
  const Labels rest = rho.complement({"A"});
  order.insert(order.end(), rest.begin(), rest.end());
  return rho.reordered(order);
}

}  // namespace detail

/// Generic route: the rotated Petz map for sigma = sum_z Q^z rho Q^z and the
/// channel M_{A->X} (x) id_B. Works for any PVMs; output ordered A, B.
inline CpMap measurement_recovery_map(const DensityOperator& rho_ab, const Pvm& x_pvm,
                                      const Pvm& z_pvm, const Quadrature& quad,
                                      RecoveryOptions opts = {}) {
  const DensityOperator rho = detail::a_first(rho_ab);
  require_pvm_fits(rho, x_pvm, 0, "measurement_recovery_map");
  require_pvm_fits(rho, z_pvm, 0, "measurement_recovery_map");
  const DensityOperator sigma = pinch(rho, z_pvm, "A");
  const std::size_t db = rho.dim() / rho.dims()[0];
  const CpMap channel = measurement_channel(x_pvm).tensor_identity(db);
  CpMap m = rotated_petz_map(sigma.matrix(), channel, quad, opts);
  // keep the caller's B factorisation in the declared dims
  Dims in{x_pvm.size()}, out{rho.dims()[0]};
  in.insert(in.end(), rho.dims().begin() + 1, rho.dims().end());
  out.insert(out.end(), rho.dims().begin() + 1, rho.dims().end());
  CpMap shaped = CpMap::from_choi(m.choi(), in, out);
  shaped.with_support(*m.support());
  return shaped;
}

/// Closed-form recovery XB -> AB for a rank-one Z measurement:
///   R(xi) = sum_{z,x,z'} |z><z|P^x|z'><z'| (x) int dt p(t) M_zx(t) xi_x M_z'x(t)^dagger
/// with M_zx(t) = (w^z)^{(1-it)/2} (th^x)^{(-1+it)/2}, w^z = <z|rho|z>,
/// th^x = sum_z <z|P^x|z> w^z and xi_x = <x|xi|x>. Writing
/// P^x = sum_e |e><e|, each node contributes the Kraus operators
///   sqrt(w) sum_z <z|e> (|z> (x) M_zx(t)) <x|_X.
/// Outcomes with th^x = 0 contribute nothing. Declared support:
/// supp(theta_XB); with completion the complement goes to
/// sum_z |z><z| (x) w^z.
inline CpMap eur_recovery_map(const DensityOperator& rho_ab, const Pvm& x_pvm, const Pvm& z_pvm,
                              const Quadrature& quad, RecoveryOptions opts = {}) {
  if (opts.check_quadrature) quad.validate();
  require_rank_one(z_pvm, "eur_recovery_map");
  const DensityOperator rho = detail::a_first(rho_ab);
  require_pvm_fits(rho, x_pvm, 0, "eur_recovery_map");
  require_pvm_fits(rho, z_pvm, 0, "eur_recovery_map");

  const std::size_t da = rho.dims()[0];
  const std::size_t db = rho.dim() / da;
  const std::size_t nx = x_pvm.size();
  const std::size_t nz = z_pvm.size();
  const CqState omega = measure(rho, z_pvm, "A", "Z");
  const CqState theta = theta_state(rho, x_pvm, z_pvm, "A", "X");

  std::vector<HermEig> oe, te;
  double omax = 0.0, tmax = 0.0;
  for (std::size_t z = 0; z < nz; ++z) {
    oe.push_back(herm_eig(omega.block(z)));
    omax = std::max(omax, oe.back().max_value());
  }
  for (std::size_t x = 0; x < nx; ++x) {
    te.push_back(herm_eig(theta.block(x)));
    tmax = std::max(tmax, te.back().max_value());
  }
  const double ofloor = kSupportCutoff * omax;
  const double tfloor = kSupportCutoff * tmax;

  std::vector<CVector> zvec;
  for (std::size_t z = 0; z < nz; ++z) zvec.push_back(z_pvm.basis_vector(z));
  // range(P^x) bases
  std::vector<std::vector<CVector>> range(nx);
  for (std::size_t x = 0; x < nx; ++x) {
    const HermEig pe = herm_eig(x_pvm[x]);
    for (Eigen::Index k = 0; k < pe.values.size(); ++k) {
      if (pe.values(k) > 0.5) range[x].push_back(pe.vectors.col(k));
    }
  }

  const auto dbi = static_cast<Eigen::Index>(db);
  const std::size_t din = nx * db;
  const std::size_t dout = da * db;
  const auto n = static_cast<Eigen::Index>(din * dout);
  CMatrix choi = CMatrix::Zero(n, n);
  CMatrix stacked = CMatrix::Zero(n, static_cast<Eigen::Index>(da));
  CMatrix k_op(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(din));
  for (std::size_t q = 0; q < quad.nodes.size(); ++q) {
    const double t = quad.nodes[q];
    const double sw = std::sqrt(quad.weights[q]);
    std::vector<CMatrix> wpow;
    for (std::size_t z = 0; z < nz; ++z) {
      wpow.push_back(power_on_support(oe[z], Complex(0.5, -0.5 * t), ofloor));
    }
    Eigen::Index col = 0;
    stacked.setZero();
    for (std::size_t x = 0; x < nx; ++x) {
      if (te[x].max_value() <= tfloor) continue;
      const CMatrix tpow = power_on_support(te[x], Complex(-0.5, 0.5 * t), tfloor);
      std::vector<CMatrix> m_zx;
      for (std::size_t z = 0; z < nz; ++z) m_zx.push_back(wpow[z] * tpow);
      for (const CVector& e : range[x]) {
        k_op.setZero();
        for (std::size_t z = 0; z < nz; ++z) {
          const Complex amp = zvec[z].dot(e);  // <z|e>
          if (amp == Complex(0.0)) continue;
          k_op.middleCols(static_cast<Eigen::Index>(x) * dbi, dbi) +=
              sw * amp * tensor(CMatrix(zvec[z]), m_zx[z]);
        }
        stacked.col(col++) = detail::choi_vec(k_op);
      }
    }
    choi.noalias() += stacked * stacked.adjoint();
  }

  const CMatrix theta_xb = theta.to_density().matrix();
  const CMatrix support = support_projector(theta_xb, tfloor);
  if (opts.complete) {
    CMatrix reference = CMatrix::Zero(static_cast<Eigen::Index>(dout), static_cast<Eigen::Index>(dout));
    for (std::size_t z = 0; z < nz; ++z) reference += tensor(projector(zvec[z]), omega.block(z));
    choi += detail::choi_from_kraus(detail::completion_kraus(support, reference), din, dout);
  }

  Dims in{nx}, out{da};
  in.insert(in.end(), rho.dims().begin() + 1, rho.dims().end());
  out.insert(out.end(), rho.dims().begin() + 1, rho.dims().end());
  CpMap m = CpMap::from_choi(std::move(choi), in, out);
  m.with_support(support);
  return m;
}

}  // namespace eurqsi
