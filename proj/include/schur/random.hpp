// Copyright 2026 The schur-stream Authors
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

// Random test inputs: Haar unitaries, pure states and density matrices.

#pragma once

#include <random>

#include "schur/common.hpp"

namespace schur {

template <typename Rng>
CMatrix ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  CMatrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) g(i, j) = {normal(rng), normal(rng)};
  return g;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
template <typename Rng>
CMatrix haar_unitary(Eigen::Index dim, Rng& rng) {
  CMatrix g = ginibre(dim, dim, rng);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  CMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const cplx diag = r(i, i);
    const double mag = std::abs(diag);
    q.col(i) *= mag > 0 ? diag / mag : cplx(1.0);
  }
  return q;
}

template <typename Rng>
CVector random_pure_state(Eigen::Index dim, Rng& rng) {
  CVector v = ginibre(dim, 1, rng).col(0);
  return v / v.norm();
}

/// Random density matrix of the given rank (induced measure).
template <typename Rng>
CMatrix random_density(Eigen::Index dim, Eigen::Index rank, Rng& rng) {
  CMatrix g = ginibre(dim, rank, rng);
  CMatrix rho = g * g.adjoint();
  return rho / rho.trace().real();
}

}  // namespace schur
