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

// Gelfand-Tsetlin realization of the U(d) irreps Q_lambda.
//
// Basis vectors are GT patterns ordered descending-lexicographically on the
// rows flattened top to bottom, so index 0 is always the highest-weight
// vector. Generators follow the orthonormal Gelfand-Tsetlin formulas with
// real, non-negative raising and lowering coefficients. For the fundamental
// irrep (1,0,...,0) this basis is the computational basis |0>,...,|d-1> and
// E_{a,b} is the elementary matrix e_{a,b}.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "schur/common.hpp"
#include "schur/partitions.hpp"

namespace schur {

/// Interlacing triangular array. rows()[0] is the top row (d entries, equal
/// to lambda); rows()[r] has d - r entries.
class GTPattern {
 public:
  explicit GTPattern(std::vector<std::vector<int>> rows)
      : rows_(std::move(rows)) {}

  const std::vector<std::vector<int>>& rows() const { return rows_; }
  int d() const { return static_cast<int>(rows_.size()); }

  /// Entry m_{k,i} in the usual 1-based labelling: row k has k entries.
  int m(int k, int i) const { return rows_[d() - k][i - 1]; }

  int row_sum(int k) const {
    if (k == 0) return 0;
    int s = 0;
    for (int v : rows_[d() - k]) s += v;
    return s;
  }

  /// Eigenvalue of E_{a,a} (0-based a).
  int weight(int a) const { return row_sum(a + 1) - row_sum(a); }

  std::vector<int> flattened() const {
    std::vector<int> out;
    for (const auto& r : rows_) out.insert(out.end(), r.begin(), r.end());
    return out;
  }

  bool interlaces() const {
    for (std::size_t r = 1; r < rows_.size(); ++r) {
      for (std::size_t i = 0; i < rows_[r].size(); ++i) {
        if (rows_[r][i] > rows_[r - 1][i] || rows_[r][i] < rows_[r - 1][i + 1])
          return false;
      }
    }
    return true;
  }

  auto operator<=>(const GTPattern&) const = default;
  bool operator==(const GTPattern&) const = default;

 private:
  std::vector<std::vector<int>> rows_;
};

inline std::vector<GTPattern> enumerate_gt(const Partition& lambda) {
  std::vector<std::vector<int>> rows{lambda.parts()};
  std::vector<GTPattern> out;
  auto rec = [&](auto&& self) -> void {
    const std::vector<int> above = rows.back();
    if (above.size() == 1) {
      out.emplace_back(rows);
      return;
    }
    std::vector<int> row(above.size() - 1);
    auto fill = [&](auto&& fill_self, std::size_t i) -> void {
      if (i == row.size()) {
        rows.push_back(row);
        self(self);
        rows.pop_back();
        return;
      }
      for (int v = above[i]; v >= above[i + 1]; --v) {
        row[i] = v;
        fill_self(fill_self, i + 1);
      }
    };
    fill(fill, 0);
  };
  rec(rec);
  std::sort(out.begin(), out.end(),
            [](const GTPattern& a, const GTPattern& b) {
              return a.flattened() > b.flattened();
            });
  return out;
}

/// Casimir eigenvalue sum_{a,b} E_{a,b} E_{b,a} on Q_lambda:
/// sum_i lambda_i (lambda_i + d + 1 - 2(i+1)) with 0-based i.
inline long casimir2_exact(const Partition& lambda) {
  long c = 0;
  const int d = lambda.d();
  for (int i = 0; i < d; ++i) {
    c += static_cast<long>(lambda[i]) * (lambda[i] + d + 1 - 2 * (i + 1));
  }
  return c;
}

inline double casimir2(const Partition& lambda) {
  return static_cast<double>(casimir2_exact(lambda));
}

/// Generator matrices of Q_lambda in the GT basis. All matrices are real.
class IrrepRep {
 public:
  explicit IrrepRep(const Partition& lambda)
      : lambda_(lambda), basis_(enumerate_gt(lambda)) {
    const int d = lambda.d();
    const auto dim = static_cast<Eigen::Index>(basis_.size());
    std::map<std::vector<int>, Eigen::Index> index;
    for (Eigen::Index i = 0; i < dim; ++i) index[basis_[i].flattened()] = i;

    weights_.assign(d, RVector::Zero(dim));
    for (Eigen::Index s = 0; s < dim; ++s) {
      for (int a = 0; a < d; ++a) weights_[a](s) = basis_[s].weight(a);
    }

    raising_.assign(d - 1, RMatrix::Zero(dim, dim));
    for (int a = 0; a + 1 < d; ++a) {
      const int k = a + 1;  // the row with k entries moves
      for (Eigen::Index s = 0; s < dim; ++s) {
        const GTPattern& p = basis_[s];
        for (int i = 1; i <= k; ++i) {
          auto rows = p.rows();
          rows[d - k][i - 1] += 1;
          GTPattern q(rows);
          if (!q.interlaces()) continue;
          const double coeff = raising_coefficient(p, k, i);
          raising_[a](index.at(q.flattened()), s) = coeff;
        }
      }
    }
    check_simple_commutators();
  }

  /// Max deviation of [E_{a,a+1}, E_{a+1,a}] from E_{a,a} - E_{a+1,a+1}.
  double simple_commutator_error() const {
    double err = 0.0;
    for (int a = 0; a + 1 < d(); ++a) {
      const RMatrix& up = raising_[a];
      RMatrix comm = up * up.transpose() - up.transpose() * up;
      RMatrix expected = (weights_[a] - weights_[a + 1]).asDiagonal();
      if (dim() > 0) err = std::max(err, (comm - expected).cwiseAbs().maxCoeff());
    }
    return err;
  }

  const Partition& lambda() const { return lambda_; }
  int d() const { return lambda_.d(); }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(basis_.size()); }
  const std::vector<GTPattern>& basis() const { return basis_; }

  /// E_{a,a+1}.
  const RMatrix& raising(int a) const { return raising_.at(a); }
  /// E_{a+1,a}.
  RMatrix lowering(int a) const { return raising_.at(a).transpose(); }
  /// Diagonal of E_{a,a}.
  const RVector& weight(int a) const { return weights_.at(a); }

  /// E_{a,b} for any pair, built from simple generators by commutators.
  RMatrix generator(int a, int b) const {
    if (a == b) return weights_.at(a).asDiagonal();
    if (a > b) return generator(b, a).transpose();
    RMatrix e = raising_.at(a);
    for (int c = a + 1; c < b; ++c) {
      const RMatrix& next = raising_.at(c);
      e = (e * next - next * e).eval();
    }
    return e;
  }

  RMatrix casimir_matrix() const {
    const int d = this->d();
    RMatrix c = RMatrix::Zero(dim(), dim());
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        c += generator(a, b) * generator(b, a);
      }
    }
    return c;
  }

  /// Q_lambda(U) for a unitary U in U(d), via U = exp(iH) and the Lie algebra
  /// action dQ(H) = sum_{a,b} H_{a,b} E_{a,b}.
  CMatrix action(const CMatrix& u) const {
    const int d = this->d();
    if (u.rows() != d || u.cols() != d) {
      throw ValidationError("unitary has the wrong size");
    }
    Eigen::ComplexSchur<CMatrix> schur(u);
    const CMatrix& z = schur.matrixU();
    const CMatrix& t = schur.matrixT();
    CVector angles(d);
    for (int i = 0; i < d; ++i) angles(i) = std::arg(t(i, i));
    CMatrix h = z * angles.asDiagonal() * z.adjoint();
    CMatrix dq = CMatrix::Zero(dim(), dim());
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        if (std::abs(h(a, b)) == 0.0) continue;
        dq += h(a, b) * generator(a, b).cast<cplx>();
      }
    }
    dq = (0.5 * (dq + dq.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(dq);
    CVector phases(dim());
    for (Eigen::Index i = 0; i < dim(); ++i) {
      phases(i) = std::polar(1.0, eig.eigenvalues()(i));
    }
    return eig.eigenvectors() * phases.asDiagonal() *
           eig.eigenvectors().adjoint();
  }

 private:
  void check_simple_commutators() const {
    const double err = simple_commutator_error();
    if (err > 1e-10) {
      throw NumericalError("GT generators of " + lambda_.to_string() +
                           " violate commutation relations by " +
                           std::to_string(err));
    }
  }

  // Orthonormal GT coefficient for E_{k,k+1}: pattern p -> p + delta_{k,i}.
  static double raising_coefficient(const GTPattern& p, int k, int i) {
    auto l = [&](int row, int idx) { return p.m(row, idx) - idx + 1; };
    const double lki = l(k, i);
    double num = -1.0;
    for (int j = 1; j <= k + 1; ++j) num *= lki - l(k + 1, j);
    for (int j = 1; j <= k - 1; ++j) num *= lki - l(k - 1, j) + 1;
    double den = 1.0;
    for (int j = 1; j <= k; ++j) {
      if (j == i) continue;
      den *= (lki - l(k, j)) * (lki - l(k, j) + 1);
    }
    const double ratio = num / den;
    if (ratio < -1e-9) {
      throw NumericalError("negative GT coefficient; pattern bookkeeping bug");
    }
    return std::sqrt(std::max(0.0, ratio));
  }

  Partition lambda_;
  std::vector<GTPattern> basis_;
  std::vector<RVector> weights_;
  std::vector<RMatrix> raising_;
};

/// Process-wide cache of irreps; concurrent readers, serialized insertion.
inline std::shared_ptr<const IrrepRep> build_irrep(const Partition& lambda) {
  static std::shared_mutex mutex;
  static std::map<Partition, std::shared_ptr<const IrrepRep>> cache;
  {
    std::shared_lock lock(mutex);
    auto it = cache.find(lambda);
    if (it != cache.end()) return it->second;
  }
  auto rep = std::make_shared<const IrrepRep>(lambda);
  std::unique_lock lock(mutex);
  return cache.emplace(lambda, std::move(rep)).first->second;
}

}  // namespace schur
