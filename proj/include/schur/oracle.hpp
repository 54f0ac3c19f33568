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

// Dense Schur transform on d^n dimensions, for checking the streaming
// sampler at small n.
//
// Row ordering: rows are grouped by copy (lambda, path); copies are sorted
// lexicographically by their step sequence, and within a copy rows follow
// the GT order of Q_lambda. With this ordering each super-CG layer is block
// diagonal with the CG transforms placed in sequence, no permutation needed.

#pragma once

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "schur/cg.hpp"
#include "schur/common.hpp"
#include "schur/partitions.hpp"

namespace schur {

inline constexpr std::size_t kOracleMaxDim = 1024;

struct SchurRow {
  Partition lambda;
  LatticePath path;
  Eigen::Index q = 0;
};

struct SchurCopy {
  LatticePath path;  // path.end() is lambda
  Eigen::Index offset = 0;
  Eigen::Index dim = 0;
};

struct SchurUnitary {
  int n = 1;
  int d = 2;
  CMatrix matrix;
  std::vector<SchurRow> rows;
  std::vector<SchurCopy> copies;

  Eigen::Index size() const { return matrix.rows(); }

  /// Rows of the matrix belonging to lambda (optionally one copy only).
  std::vector<Eigen::Index> row_indices(const Partition& lambda) const {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < rows.size(); ++i)
      if (rows[i].lambda == lambda) out.push_back(static_cast<Eigen::Index>(i));
    return out;
  }
};

namespace detail {

inline std::vector<SchurCopy> copies_at_level(int k, int d) {
  // level 1: the single copy of (1)
  std::vector<SchurCopy> copies{{LatticePath(d, {}), 0, d}};
  for (int level = 1; level < k; ++level) {
    std::vector<SchurCopy> next;
    Eigen::Index offset = 0;
    for (const auto& c : copies) {
      for (int j = 0; j < d; ++j) {
        if (!can_add_box(c.path.end(), j)) continue;
        LatticePath p = c.path.extended(j);
        const auto dim = static_cast<Eigen::Index>(dim_unitary_size(p.end()));
        next.push_back({p, offset, dim});
        offset += dim;
      }
    }
    copies = std::move(next);
  }
  return copies;
}

inline void check_oracle_size(int n, int d, std::size_t max_dim) {
  if (n < 1) throw ValidationError("oracle needs n >= 1");
  if (d < 2) throw ValidationError("oracle needs d >= 2");
  checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(n), max_dim);
}

}  // namespace detail

/// U^{S-CG}(k): the direct sum of CG transforms over the level-k copies,
/// acting on (C^d)^{(x)k} (x) C^d expressed in the level-k Schur basis.
inline CMatrix super_cg(int k, int d, std::size_t max_dim = kOracleMaxDim) {
  if (k < 1) throw ValidationError("super_cg needs k >= 1");
  detail::check_oracle_size(k + 1, d, max_dim);
  const auto copies = detail::copies_at_level(k, d);
  const Eigen::Index total = static_cast<Eigen::Index>(
      checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(k + 1), max_dim));
  CMatrix out = CMatrix::Zero(total, total);
  for (const auto& c : copies) {
    auto t = cg_transform(c.path.end());
    out.block(c.offset * d, c.offset * d, t->size(), t->size()) = t->matrix;
  }
  return out;
}

/// U^Sch(n) = S(n-1) (S(n-2) (x) I) ... (S(1) (x) I^{(x) n-2}), qudit 1 most
/// significant in the computational index.
inline SchurUnitary schur_transform(int n, int d, std::size_t max_dim = kOracleMaxDim) {
  detail::check_oracle_size(n, d, max_dim);
  SchurUnitary su;
  su.n = n;
  su.d = d;
  su.matrix = CMatrix::Identity(d, d);
  for (int k = 1; k < n; ++k) {
    // (U_k (x) I_d) followed by the super CG, applied copy by copy.
    CMatrix padded = kron(su.matrix, CMatrix::Identity(d, d));
    for (const auto& c : detail::copies_at_level(k, d)) {
      auto t = cg_transform(c.path.end());
      auto rows = padded.middleRows(c.offset * d, t->size());
      rows = (t->matrix * rows).eval();
    }
    su.matrix = std::move(padded);
  }
  su.copies = detail::copies_at_level(n, d);
  for (const auto& c : su.copies)
    for (Eigen::Index q = 0; q < c.dim; ++q) su.rows.push_back({c.path.end(), c.path, q});
  if (static_cast<Eigen::Index>(su.rows.size()) != su.size()) {
    throw NumericalError("Schur row table does not cover the space");
  }
  return su;
}

inline CMatrix projector_from_rows(const SchurUnitary& su,
                                   const std::vector<Eigen::Index>& idx) {
  CMatrix r(static_cast<Eigen::Index>(idx.size()), su.size());
  for (std::size_t i = 0; i < idx.size(); ++i) r.row(i) = su.matrix.row(idx[i]);
  return r.adjoint() * r;
}

/// Pi^Std_lambda = U^dagger Pi^Sch_lambda U.
inline CMatrix isotypic_projector(const SchurUnitary& su, const Partition& lambda) {
  auto idx = su.row_indices(lambda);
  if (idx.empty()) {
    throw ValidationError("partition " + lambda.to_string() + " has no Schur rows at n=" +
                          std::to_string(su.n));
  }
  return projector_from_rows(su, idx);
}

/// Pi^Std_{lambda, p}: one copy of Q_lambda, selected by its lattice path.
inline CMatrix copy_projector(const SchurUnitary& su, const Partition& lambda,
                              const LatticePath& path) {
  if (path.end() != lambda) {
    throw ValidationError("path " + path.to_string() + " does not end at " +
                          lambda.to_string());
  }
  for (const auto& c : su.copies) {
    if (c.path != path) continue;
    std::vector<Eigen::Index> idx(c.dim);
    std::iota(idx.begin(), idx.end(), c.offset);
    return projector_from_rows(su, idx);
  }
  throw ValidationError("no copy with path " + path.to_string());
}

inline void check_density(const CMatrix& rho, Eigen::Index dim, double tol = 1e-9) {
  if (rho.rows() != dim || rho.cols() != dim) {
    throw ValidationError("density matrix must be " + std::to_string(dim) + "x" +
                          std::to_string(dim));
  }
  if (max_abs(rho - rho.adjoint()) > tol) throw ValidationError("state is not Hermitian");
  if (std::abs(rho.trace() - cplx(1.0)) > tol) throw ValidationError("state trace is not 1");
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) throw ValidationError("state is not PSD");
}

struct WeakSchurProbs {
  std::map<Partition, double> by_lambda;          // tr[rho Pi^Std_lambda]
  std::map<LatticePath, double> by_path;          // tr[rho Pi^Std_{lambda,p}]
  double route_gap = 0.0;  // max |standard route - Schur-basis route|
};

/// Both routes: traces against standard-basis projectors, and diagonal sums
/// of rho~ = U rho U^dagger in the Schur basis. Throws if they disagree.
inline WeakSchurProbs weak_schur_probs(const CMatrix& rho, const SchurUnitary& su) {
  check_density(rho, su.size());
  WeakSchurProbs out;
  const CMatrix tilde = su.matrix * rho * su.matrix.adjoint();
  for (const auto& c : su.copies) {
    double diag = 0.0;
    for (Eigen::Index q = 0; q < c.dim; ++q) diag += tilde(c.offset + q, c.offset + q).real();
    out.by_path[c.path] = diag;
    out.by_lambda[c.path.end()] += diag;
  }
  for (auto& [lambda, schur_route] : out.by_lambda) {
    const double standard = (rho * isotypic_projector(su, lambda)).trace().real();
    out.route_gap = std::max(out.route_gap, std::abs(standard - schur_route));
    schur_route = standard;
  }
  if (out.route_gap > 1e-10) {
    throw NumericalError("Schur-basis and standard-basis routes disagree by " +
                         std::to_string(out.route_gap));
  }
  return out;
}

inline WeakSchurProbs weak_schur_probs_pure(const CVector& psi, const SchurUnitary& su) {
  return weak_schur_probs(psi * psi.adjoint(), su);
}

/// P(sigma)|i_1 ... i_n> = |i_{sigma^-1(1)} ... i_{sigma^-1(n)}>; sigma is
/// 0-based, sigma[a] = image of position a.
inline CMatrix perm_rep(const std::vector<int>& sigma, int d,
                        std::size_t max_dim = kOracleMaxDim) {
  const int n = static_cast<int>(sigma.size());
  std::vector<int> sorted = sigma;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[i] != i) throw ValidationError("not a permutation");
  }
  detail::check_oracle_size(n, d, max_dim);
  const auto dim = static_cast<Eigen::Index>(
      checked_pow(static_cast<std::size_t>(d), static_cast<std::size_t>(n), max_dim));
  CMatrix p = CMatrix::Zero(dim, dim);
  std::vector<int> digits(n), moved(n);
  for (Eigen::Index idx = 0; idx < dim; ++idx) {
    Eigen::Index rest = idx;
    for (int a = n - 1; a >= 0; --a) {
      digits[a] = static_cast<int>(rest % d);
      rest /= d;
    }
    // the symbol at position a moves to position sigma[a]
    for (int a = 0; a < n; ++a) moved[sigma[a]] = digits[a];
    Eigen::Index target = 0;
    for (int a = 0; a < n; ++a) target = target * d + moved[a];
    p(target, idx) = 1.0;
  }
  return p;
}

inline CMatrix tensor_rep(const CMatrix& u, int n, std::size_t max_dim = kOracleMaxDim) {
  if (u.rows() != u.cols()) throw ValidationError("unitary must be square");
  if (unitarity_error(u) > 1e-10) throw ValidationError("matrix is not unitary");
  detail::check_oracle_size(n, static_cast<int>(u.rows()), max_dim);
  CMatrix out = u;
  for (int i = 1; i < n; ++i) out = kron(out, u);
  return out;
}

}  // namespace schur
