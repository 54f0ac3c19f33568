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

#pragma once

#include <cmath>
#include <vector>

#include "schur/common.hpp"

namespace schur {

/// A unitary acting non-trivially only on coordinates lo < hi.
struct TwoLevelUnitary {
  Eigen::Index lo = 0;
  Eigen::Index hi = 0;
  Eigen::Matrix2cd block = Eigen::Matrix2cd::Identity();

  CMatrix embed(Eigen::Index dim) const {
    CMatrix out = CMatrix::Identity(dim, dim);
    out(lo, lo) = block(0, 0);
    out(lo, hi) = block(0, 1);
    out(hi, lo) = block(1, 0);
    out(hi, hi) = block(1, 1);
    return out;
  }
};

/// U = rotations[0] * rotations[1] * ... * diag(phases).
struct GivensDecomposition {
  Eigen::Index dim = 0;
  std::vector<TwoLevelUnitary> rotations;
  CVector phases;

  CMatrix reconstruct() const {
    CMatrix out = CMatrix::Identity(dim, dim);
    for (const auto& r : rotations) {
      // Right-multiplication only touches columns lo and hi.
      CVector col_lo = out.col(r.lo);
      CVector col_hi = out.col(r.hi);
      out.col(r.lo) = col_lo * r.block(0, 0) + col_hi * r.block(1, 0);
      out.col(r.hi) = col_lo * r.block(0, 1) + col_hi * r.block(1, 1);
    }
    return out * phases.asDiagonal();
  }
};

/// Column-by-column elimination of the entries below the diagonal, each by a
/// two-level rotation pairing the pivot row with the row being cleared.
/// Entries with magnitude <= tol are treated as zero and cost nothing.
inline GivensDecomposition givens_decompose(const CMatrix& u, double tol = 1e-12) {
  if (u.rows() != u.cols()) throw ValidationError("matrix is not square");
  if (unitarity_error(u) > 1e-10) {
    throw ValidationError("givens_decompose needs a unitary matrix");
  }
  const Eigen::Index n = u.rows();
  CMatrix w = u;
  GivensDecomposition out;
  out.dim = n;
  for (Eigen::Index c = 0; c < n; ++c) {
    for (Eigen::Index r = n - 1; r > c; --r) {
      const cplx b = w(r, c);
      if (std::abs(b) <= tol) {
        w(r, c) = 0.0;
        continue;
      }
      const cplx a = w(c, c);
      const double norm = std::hypot(std::abs(a), std::abs(b));
      Eigen::Matrix2cd g;
      g << std::conj(a) / norm, std::conj(b) / norm, -b / norm, a / norm;
      for (Eigen::Index k = 0; k < n; ++k) {
        const cplx top = w(c, k);
        const cplx bottom = w(r, k);
        w(c, k) = g(0, 0) * top + g(0, 1) * bottom;
        w(r, k) = g(1, 0) * top + g(1, 1) * bottom;
      }
      w(r, c) = 0.0;
      out.rotations.push_back({c, r, g.adjoint()});
    }
  }
  out.phases = w.diagonal();
  return out;
}

inline std::size_t givens_count(const CMatrix& u) {
  return givens_decompose(u).rotations.size();
}

}  // namespace schur
