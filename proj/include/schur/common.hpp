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

#include <complex>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace schur {

inline constexpr const char* kVersion = "0.1.0";

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using RowMajorCMatrix =
    Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Bad user input: malformed partitions, non-normalized states, bad flags.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A configured guardrail was hit (oracle size, branch cap, integer width).
class LimitError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Internal numerical inconsistency; indicates a bug or corrupted state.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::size_t checked_pow(std::size_t base, std::size_t exp,
                               std::size_t limit) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (out > limit / base) {
      throw LimitError("dimension " + std::to_string(base) + "^" +
                       std::to_string(exp) + " exceeds limit " +
                       std::to_string(limit));
    }
    out *= base;
  }
  return out;
}

/// Kronecker product, second factor fastest-varying.
template <typename A, typename B>
auto kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  using Scalar = typename A::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
      a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
          a(i, j) * b.template cast<Scalar>();
    }
  }
  return out;
}

inline double max_abs(const CMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double unitarity_error(const CMatrix& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const Eigen::Index n = u.rows();
  if (n == 0) return 0.0;
  if (u.imag().cwiseAbs().maxCoeff() == 0.0) {
    // real input: a quarter of the work
    const RMatrix r = u.real();
    RMatrix g = RMatrix::Zero(n, n);
    g.selfadjointView<Eigen::Lower>().rankUpdate(r.transpose());
    g.diagonal().array() -= 1.0;
    return g.triangularView<Eigen::Lower>().toDenseMatrix().cwiseAbs().maxCoeff();
  }
  return (u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

}  // namespace schur
