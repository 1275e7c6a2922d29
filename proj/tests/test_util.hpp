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

#pragma once

#include <random>

#include "eurqsi/qmat.hpp"
#include "eurqsi/qstate.hpp"

namespace eurqsi::testing {

inline CMatrix random_hermitian(std::size_t d, std::mt19937_64& rng) {
  const CMatrix g = gaussian_matrix(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

inline CMatrix diag(std::initializer_list<double> values) {
  CMatrix m = CMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                            static_cast<Eigen::Index>(values.size()));
  Eigen::Index k = 0;
  for (double v : values) m(k, k) = v, ++k;
  return m;
}

inline CVector plus() { return (ket(2, 0) + ket(2, 1)) / std::sqrt(2.0); }
inline CVector minus() { return (ket(2, 0) - ket(2, 1)) / std::sqrt(2.0); }
inline CVector plus_y() {
  return (ket(2, 0) + Complex(0, 1) * ket(2, 1)) / std::sqrt(2.0);
}
inline CVector bell_phi() {
  return (ket(4, 0) + ket(4, 3)) / std::sqrt(2.0);
}
inline CMatrix mixed(std::size_t d) { return identity(d) / double(d); }

}  // namespace eurqsi::testing
