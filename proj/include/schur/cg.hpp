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

// Clebsch-Gordan transform U^CG_lambda : Q_lambda (x) C^d -> (+)_j Q_{lambda+e_j}.
//
// Conventions shared by both constructions:
//  * input index = g * d + f, with g the GT index of Q_lambda and f the
//    computational index of the new qudit (fastest-varying);
//  * output rows are grouped in blocks for j = 0, 1, ... (valid j only), and
//    within a block follow the GT order of Q_{lambda+e_j};
//  * row r of the matrix is the conjugated coupled state, so
//    matrix * (input vector) gives coupled-basis coordinates;
//  * the highest-weight vector of every block has its first nonzero input
//    coordinate positive; all other rows follow from the non-negative GT
//    lowering coefficients. For d = 2 this is the Condon-Shortley convention.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <vector>

#include <Eigen/QR>
#include <Eigen/SVD>
#include <Eigen/SparseCore>

#include "schur/common.hpp"
#include "schur/givens.hpp"
#include "schur/gt_basis.hpp"
#include "schur/partitions.hpp"

namespace schur {

struct CGBlock {
  int j = 0;
  Partition target;
  Eigen::Index offset = 0;
  Eigen::Index dim = 0;
};

struct CGTransform {
  Partition lambda;
  int d = 2;
  CMatrix matrix;
  std::vector<CGBlock> blocks;

  Eigen::Index size() const { return matrix.rows(); }

  const CGBlock* block_for(int j) const {
    for (const auto& b : blocks)
      if (b.j == j) return &b;
    return nullptr;
  }
};

/// Valid row additions of lambda with their target dimensions, j ascending.
inline std::vector<CGBlock> cg_block_table(const Partition& lambda) {
  std::vector<CGBlock> blocks;
  Eigen::Index offset = 0;
  for (int j = 0; j < lambda.d(); ++j) {
    auto target = add_box(lambda, j);
    if (!target) continue;
    const auto dim = static_cast<Eigen::Index>(dim_unitary_size(*target));
    blocks.push_back({j, *target, offset, dim});
    offset += dim;
  }
  return blocks;
}

/// Closed-form spin-j (x) spin-1/2 coupling, j = (lambda0 - lambda1)/2.
inline CGTransform cg_qubit(const Partition& lambda) {
  if (lambda.d() != 2) {
    throw ValidationError("cg_qubit needs d = 2, got d = " +
                          std::to_string(lambda.d()));
  }
  const int dim_in = lambda[0] - lambda[1] + 1;  // 2 j1 + 1
  const int two_j1 = dim_in - 1;
  CGTransform t;
  t.lambda = lambda;
  t.d = 2;
  t.blocks = cg_block_table(lambda);
  t.matrix = CMatrix::Zero(2 * dim_in, 2 * dim_in);

  // Work with doubled quantum numbers so everything stays integral.
  auto column = [&](int two_m1, int f) -> Eigen::Index {
    const int g = (two_j1 - two_m1) / 2;
    return static_cast<Eigen::Index>(g) * 2 + f;
  };
  const double denom = two_j1 + 1;
  for (const auto& block : t.blocks) {
    const bool upper = block.j == 0;  // J = j1 + 1/2
    const int two_J = upper ? two_j1 + 1 : two_j1 - 1;
    for (Eigen::Index r = 0; r < block.dim; ++r) {
      const int two_M = two_J - 2 * static_cast<int>(r);
      const Eigen::Index row = block.offset + r;
      // |J M> = a |M - 1/2, up> + b |M + 1/2, down>
      const int two_m_up = two_M - 1;
      const int two_m_down = two_M + 1;
      double a, b;
      if (upper) {
        a = std::sqrt((two_j1 + two_M + 1) / (2.0 * denom));
        b = std::sqrt((two_j1 - two_M + 1) / (2.0 * denom));
      } else {
        a = -std::sqrt((two_j1 - two_M + 1) / (2.0 * denom));
        b = std::sqrt((two_j1 + two_M + 1) / (2.0 * denom));
      }
      if (std::abs(two_m_up) <= two_j1) t.matrix(row, column(two_m_up, 0)) = a;
      if (std::abs(two_m_down) <= two_j1)
        t.matrix(row, column(two_m_down, 1)) = b;
    }
  }
  return t;
}

namespace detail {

using SparseR = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Generators of Q_lambda (x) C^d: E_ab (x) I + I (x) e_ab (sparse).
struct ProductRep {
  std::vector<SparseR> raising;  // J_{a,a+1}
  std::vector<SparseR> lowering;
  std::vector<std::vector<int>> weights;  // integer weight of each basis vector
  SparseR casimir;
};

inline SparseR to_sparse(const std::vector<Eigen::Triplet<double>>& trips,
                         Eigen::Index n) {
  SparseR m(n, n);
  m.setFromTriplets(trips.begin(), trips.end());
  m.prune(0.0);
  return m;
}

inline ProductRep product_rep(const IrrepRep& rep) {
  const int d = rep.d();
  const Eigen::Index dim = rep.dim();
  const Eigen::Index n = dim * d;
  ProductRep out;

  // J_ab = E_ab (x) I + delta-shifted I (x) e_ab, entries at (g d + f).
  auto generator = [&](int a, int b) {
    const RMatrix e = rep.generator(a, b);
    std::vector<Eigen::Triplet<double>> trips;
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c)
        if (e(r, c) != 0.0)
          for (int f = 0; f < d; ++f) trips.emplace_back(r * d + f, c * d + f, e(r, c));
    for (Eigen::Index g = 0; g < dim; ++g) trips.emplace_back(g * d + a, g * d + b, 1.0);
    return to_sparse(trips, n);
  };
  for (int a = 0; a + 1 < d; ++a) {
    out.raising.push_back(generator(a, a + 1));
    out.lowering.push_back(generator(a + 1, a));
  }
  out.weights.assign(n, std::vector<int>(d, 0));
  for (Eigen::Index g = 0; g < dim; ++g)
    for (int f = 0; f < d; ++f)
      for (int a = 0; a < d; ++a)
        out.weights[g * d + f][a] =
            static_cast<int>(std::lround(rep.weight(a)(g))) + (f == a ? 1 : 0);

  // C = (c_lambda + d) I + 2 sum_ab E_ab (x) e_ba; C_lambda is scalar.
  std::vector<Eigen::Triplet<double>> trips;
  for (Eigen::Index i = 0; i < n; ++i)
    trips.emplace_back(i, i, casimir2(rep.lambda()) + d);
  for (int a = 0; a < d; ++a) {
    for (int b = 0; b < d; ++b) {
      const RMatrix e = rep.generator(a, b);
      for (Eigen::Index r = 0; r < dim; ++r)
        for (Eigen::Index c = 0; c < dim; ++c)
          if (e(r, c) != 0.0) trips.emplace_back(r * d + b, c * d + a, 2.0 * e(r, c));
    }
  }
  out.casimir = to_sparse(trips, n);
  return out;
}

/// Unit highest-weight vector of weight mu: the common kernel of all raising
/// operators inside the weight-mu subspace (one-dimensional when mu occurs).
inline RVector highest_weight_vector(const ProductRep& p, const Partition& mu) {
  const Eigen::Index n = static_cast<Eigen::Index>(p.weights.size());
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < n; ++i)
    if (p.weights[i] == mu.parts()) support.push_back(i);
  const auto s = static_cast<Eigen::Index>(support.size());
  if (s == 0) throw NumericalError("weight " + mu.to_string() + " absent");
  RMatrix k = RMatrix::Zero(n * static_cast<Eigen::Index>(p.raising.size()), s);
  for (std::size_t a = 0; a < p.raising.size(); ++a) {
    for (Eigen::Index c = 0; c < s; ++c) {
      RVector unit = RVector::Unit(n, support[c]);
      k.block(static_cast<Eigen::Index>(a) * n, c, n, 1) = p.raising[a] * unit;
    }
  }
  Eigen::JacobiSVD<RMatrix> svd(k, Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const Eigen::Index last = s - 1;
  // singular values are sorted descending; padding rows may exceed s
  const double smallest = sv.size() > last ? sv(last) : 0.0;
  const double next = last >= 1 ? sv(last - 1) : 1.0;
  if (smallest > 1e-9 || next < 1e-3) {
    throw NumericalError("highest-weight space for " + mu.to_string() +
                         " is not one-dimensional");
  }
  RVector local = svd.matrixV().col(last);
  RVector v = RVector::Zero(n);
  for (Eigen::Index c = 0; c < s; ++c) v(support[c]) = local(c);
  v /= v.norm();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v(i)) > 1e-10) {
      if (v(i) < 0) v = -v;
      break;
    }
  }
  return v;
}

}  // namespace detail

/// Numerical construction for any d. Each block is the image of the
/// intertwiner Phi : Q_mu -> Q_lambda (x) C^d fixed by Phi(e_0) = highest
/// weight vector. Below the top, Phi on each weight space of Q_mu solves
/// Phi L_a e_p = L_a Phi e_p (least squares over all lowering operators and
/// all higher patterns p). Casimir eigenvalues are then verified on each
/// block and the assembled matrix is polished to unitarity.
inline CGTransform cg_numeric(const Partition& lambda) {
  const int d = lambda.d();
  auto rep = build_irrep(lambda);
  const Eigen::Index n = rep->dim() * d;
  const auto product = detail::product_rep(*rep);

  CGTransform t;
  t.lambda = lambda;
  t.d = d;
  t.blocks = cg_block_table(lambda);
  t.matrix = CMatrix::Zero(n, n);
  RMatrix u = RMatrix::Zero(n, n);

  for (const CGBlock& block : t.blocks) {
    const Partition& mu = block.target;
    auto target = build_irrep(mu);
    const Eigen::Index bdim = target->dim();
    std::vector<RMatrix> lower_e;
    for (int a = 0; a + 1 < d; ++a) lower_e.push_back(target->lowering(a));

    // Group GT patterns of mu by weight, ordered by depth below the top.
    std::map<std::pair<int, std::vector<int>>, std::vector<Eigen::Index>> spaces;
    for (Eigen::Index m = 0; m < bdim; ++m) {
      std::vector<int> w(d);
      int depth = 0;
      for (int a = 0; a < d; ++a) {
        w[a] = static_cast<int>(std::lround(target->weight(a)(m)));
        depth += a * w[a];
      }
      spaces[{depth, w}].push_back(m);
    }

    RMatrix phi = RMatrix::Zero(n, bdim);  // column m = Phi e_m
    std::vector<bool> done(bdim, false);
    for (const auto& [key, members] : spaces) {
      if (members.front() == 0) {
        phi.col(0) = detail::highest_weight_vector(product, mu);
        done[0] = true;
        continue;
      }
      std::vector<std::pair<int, Eigen::Index>> eqs;
      for (int a = 0; a + 1 < d; ++a)
        for (Eigen::Index p = 0; p < bdim; ++p) {
          if (!done[p]) continue;
          for (Eigen::Index m : members)
            if (lower_e[a](m, p) != 0.0) {
              eqs.emplace_back(a, p);
              break;
            }
        }
      const auto rows = static_cast<Eigen::Index>(eqs.size());
      const auto cols = static_cast<Eigen::Index>(members.size());
      RMatrix b(rows, cols);
      RMatrix rhs(rows, n);
      for (Eigen::Index r = 0; r < rows; ++r) {
        const auto [a, p] = eqs[r];
        for (Eigen::Index c = 0; c < cols; ++c) b(r, c) = lower_e[a](members[c], p);
        rhs.row(r) = (product.lowering[a] * phi.col(p)).transpose();
      }
      Eigen::ColPivHouseholderQR<RMatrix> qr(b);
      if (qr.rank() != cols) {
        throw NumericalError("lowering equations are rank deficient for " +
                             mu.to_string());
      }
      RMatrix x = qr.solve(rhs);
      const double residual = (b * x - rhs).cwiseAbs().maxCoeff();
      if (residual > 1e-8) {
        throw NumericalError("no intertwiner onto " + mu.to_string() +
                             " (residual " + std::to_string(residual) + ")");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        phi.col(members[c]) = x.row(c).transpose();
        done[members[c]] = true;
      }
    }

    const double c_mu = casimir2(mu);
    const double casimir_residual =
        (RMatrix(product.casimir * phi) - c_mu * phi).cwiseAbs().maxCoeff();
    if (casimir_residual > 1e-8) {
      throw NumericalError("block " + mu.to_string() +
                           " is not a Casimir eigenspace (residual " +
                           std::to_string(casimir_residual) + ")");
    }
    u.middleRows(block.offset, bdim) = phi.transpose();
  }

  // Block rows live on single weight spaces, so u is sparse. One
  // Newton-Schulz step squares the orthogonality defect.
  const detail::SparseR us = u.sparseView(1.0, 0.0);
  detail::SparseR id(n, n);
  id.setIdentity();
  detail::SparseR defect = detail::SparseR(us * us.transpose()) - id;
  const double before = defect.coeffs().size() ? defect.coeffs().cwiseAbs().maxCoeff() : 0.0;
  if (before > 1e-6) {
    throw NumericalError("CG transform for " + lambda.to_string() +
                         " is far from unitary (error " + std::to_string(before) + ")");
  }
  const detail::SparseR polished = us - 0.5 * detail::SparseR(defect * us);
  defect = detail::SparseR(polished * polished.transpose()) - id;
  const double err = defect.coeffs().size() ? defect.coeffs().cwiseAbs().maxCoeff() : 0.0;
  if (err > 1e-12) {
    throw NumericalError("CG transform for " + lambda.to_string() +
                         " is not unitary (error " + std::to_string(err) + ")");
  }
  t.matrix = RMatrix(polished).cast<cplx>();
  return t;
}

/// Cached transform: closed form for d = 2, numerical otherwise.
inline std::shared_ptr<const CGTransform> cg_transform(const Partition& lambda) {
  static std::shared_mutex mutex;
  static std::map<Partition, std::shared_ptr<const CGTransform>> cache;
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(lambda);
    if (it != cache.end()) return it->second;
  }
  auto t = std::make_shared<const CGTransform>(
      lambda.d() == 2 ? cg_qubit(lambda) : cg_numeric(lambda));
  std::unique_lock lock(mutex);
  return cache.emplace(lambda, std::move(t)).first->second;
}

struct SparsityReport {
  Eigen::Index size = 0;
  std::size_t below_diagonal = 0;
  std::size_t max_below_per_row = 0;
  std::size_t max_below_per_column = 0;
  std::size_t max_per_row = 0;
  /// The "at most two nonzero entries per row" property.
  bool two_per_row_holds = false;
  std::size_t givens_rotations = 0;
};

inline SparsityReport verify_sparsity(const CMatrix& m, double tol = 1e-12) {
  SparsityReport r;
  r.size = m.rows();
  std::vector<std::size_t> below_col(m.cols(), 0);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::size_t row_total = 0, row_below = 0;
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m(i, j)) <= tol) continue;
      ++row_total;
      if (i > j) {
        ++row_below;
        ++below_col[j];
      }
    }
    r.below_diagonal += row_below;
    r.max_below_per_row = std::max(r.max_below_per_row, row_below);
    r.max_per_row = std::max(r.max_per_row, row_total);
  }
  for (auto c : below_col) r.max_below_per_column = std::max(r.max_below_per_column, c);
  r.two_per_row_holds = r.max_per_row <= 2;
  r.givens_rotations = givens_count(m);
  return r;
}

inline SparsityReport verify_sparsity(const CGTransform& t) {
  return verify_sparsity(t.matrix);
}

}  // namespace schur
