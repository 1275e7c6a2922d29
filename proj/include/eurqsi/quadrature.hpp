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

// Quadrature for integrals against the rotation density
// p(t) = (pi/2) / (cosh(pi t) + 1) on the real line.

#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "eurqsi/qmat.hpp"

namespace eurqsi {

inline double rotation_density(double t) {
  const double pi = std::acos(-1.0);
  return 0.5 * pi / (std::cosh(pi * t) + 1.0);
}

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton iteration on the
/// three-term recurrence), nodes ascending.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  const double pi = std::acos(-1.0);
  std::vector<double> x(n), w(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(pi * (double(i) + 0.75) / (double(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = z;
      for (std::size_t j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * double(j) - 1.0) * z * p1 - (double(j) - 1.0) * p0) / double(j);
        p0 = p1;
        p1 = p2;
      }
      dp = double(n) * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = w[n - 1 - i] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return {x, w};
}

/// Nodes t_k with weights already multiplied by p(t_k).
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;

  double normalization() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  double normalization_error() const { return std::abs(normalization() - 1.0); }

  void validate(double tol = 1e-10) const {
    if (nodes.size() != weights.size() || nodes.empty()) {
      throw InvariantError("quadrature: nodes and weights must be non-empty and paired");
    }
    for (double w : weights) {
      if (!(w > 0.0)) throw InvariantError("quadrature: weights must be positive");
    }
    if (normalization_error() > tol) {
      throw InvariantError("quadrature: weights integrate p(t) to " +
                           std::to_string(normalization()) + ", expected 1");
    }
  }

  /// Composite Gauss-Legendre on [-t_max, t_max]. The defaults truncate a
  /// tail of mass below 1e-15.
  static Quadrature rotation(double t_max = 12.0, std::size_t panels = 64,
                             std::size_t nodes_per_panel = 8) {
    if (panels == 0 || !(t_max > 0.0)) {
      throw std::invalid_argument("Quadrature::rotation: bad panel layout");
    }
    const auto [gx, gw] = gauss_legendre(nodes_per_panel);
    const double width = 2.0 * t_max / double(panels);
    Quadrature q;
    for (std::size_t p = 0; p < panels; ++p) {
      const double mid = -t_max + (double(p) + 0.5) * width;
      for (std::size_t k = 0; k < gx.size(); ++k) {
        const double t = mid + 0.5 * width * gx[k];
        q.nodes.push_back(t);
        q.weights.push_back(0.5 * width * gw[k] * rotation_density(t));
      }
    }
    return q;
  }

  /// A single node at t = 0 with unit weight (exact when every rotation acts
  /// trivially).
  static Quadrature trivial() { return Quadrature{{0.0}, {1.0}}; }
};

}  // namespace eurqsi
