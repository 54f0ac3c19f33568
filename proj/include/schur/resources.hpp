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

// Register widths and gate-count models. Every Clifford+T or universal-set
// number in here is a count model, never a synthesized circuit.

#pragma once

#include <cmath>
#include <map>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "schur/cg.hpp"
#include "schur/common.hpp"
#include "schur/givens.hpp"
#include "schur/partitions.hpp"

namespace schur {

inline constexpr const char* kModelNotice =
    "model estimate: gate counts are evaluated from a count model, no circuit is synthesized";

struct ModelParams {
  double epsilon = 1e-3;
  double c = 1.0;      // constant in delta = epsilon / (c * ...)
  double kappa = 1.0;  // CNOT/single-qubit expansion per two-level unitary, times n
  double p = 4.0;      // exponent of log(1/delta) for qudit universal sets
};

struct IterationRecord {
  int k = 0;
  int width = 0;          // qudits held during iteration k (L and Q registers)
  bool removal = false;   // one qudit discarded after iteration k
  Eigen::Index cg_size = 0;
  std::size_t givens = 0;
  BigInt iteration_bound = 0;  // two-level bound for this iteration
};

struct ResourceLedger {
  int n = 0;
  int d = 2;
  ModelParams params;
  std::vector<IterationRecord> records;

  std::size_t total_givens() const {
    std::size_t s = 0;
    for (const auto& r : records) s += r.givens;
    return s;
  }
  BigInt total_iteration_bound() const {
    BigInt s = 0;
    for (const auto& r : records) s += r.iteration_bound;
    return s;
  }
  int removals() const {
    int s = 0;
    for (const auto& r : records) s += r.removal ? 1 : 0;
    return s;
  }
  int peak_width() const {
    int w = 0;
    for (const auto& r : records) w = std::max(w, r.width);
    return w;
  }
};

// ---------------------------------------------------------------- memory

/// Smallest w with d^w >= x (x >= 1), in exact integers.
inline int ceil_log(const BigInt& x, int d) {
  int w = 0;
  BigInt p = 1;
  while (p < x) {
    p *= d;
    ++w;
  }
  return w;
}

/// Qudits in use during iteration k: one L qudit plus a Q register for
/// dimensions up to (k+2)^(d-1). For d = 2 this is ceil(log2(2k+4)).
inline int register_width(int k, int d) {
  if (k < 1 || d < 2) throw ValidationError("register_width needs k >= 1, d >= 2");
  BigInt bound = boost::multiprecision::pow(BigInt(k + 2), d - 1);
  return 1 + ceil_log(bound, d);
}

/// A qudit is dropped after iteration k when the next iteration needs no
/// more than what is left once L has been measured.
inline bool removal_after(int k, int d) {
  return register_width(k, d) != register_width(k + 1, d) - 1;
}

struct MemoryProfile {
  int n = 0;
  int d = 2;
  std::vector<int> widths;      // k = 1..n-1
  std::vector<bool> removals;   // k = 1..n-1
  int peak = 0;
};

inline MemoryProfile memory_profile(int n, int d) {
  if (n < 2) throw ValidationError("memory_profile needs n >= 2");
  MemoryProfile m;
  m.n = n;
  m.d = d;
  for (int k = 1; k < n; ++k) {
    m.widths.push_back(register_width(k, d));
    m.removals.push_back(removal_after(k, d));
    m.peak = std::max(m.peak, m.widths.back());
  }
  return m;
}

// ---------------------------------------------------------------- counts

/// Two-level bound for iteration k: 4(k+1) for qubits, d^2 (k+1)^(2d-2) else.
inline BigInt iteration_bound(int k, int d) {
  if (d == 2) return BigInt(4) * (k + 1);
  return BigInt(d) * d * boost::multiprecision::pow(BigInt(k + 1), 2 * d - 2);
}

/// Givens rotations used on the CG matrix of lambda; cached per partition.
inline std::size_t cg_givens_count(const Partition& lambda) {
  static std::mutex mutex;
  static std::map<Partition, std::size_t> cache;
  {
    std::lock_guard lock(mutex);
    auto it = cache.find(lambda);
    if (it != cache.end()) return it->second;
  }
  const std::size_t count = givens_count(cg_transform(lambda)->matrix);
  std::lock_guard lock(mutex);
  cache.emplace(lambda, count);
  return count;
}

inline IterationRecord make_record(int k, const Partition& lambda) {
  const int d = lambda.d();
  IterationRecord r;
  r.k = k;
  r.width = register_width(k, d);
  r.removal = removal_after(k, d);
  r.cg_size = static_cast<Eigen::Index>(dim_unitary_size(lambda)) * d;
  r.givens = cg_givens_count(lambda);
  r.iteration_bound = iteration_bound(k, d);
  return r;
}

/// 2n^2 + 2n - 4 as a closed form.
inline BigInt qubit_two_level_closed(int n) {
  BigInt bn = n;
  return 2 * bn * bn + 2 * bn - 4;
}

/// Sum over k = 1..n-1 of 4(k+1).
inline BigInt qubit_two_level_sum(int n) {
  BigInt s = 0;
  for (int k = 1; k < n; ++k) s += iteration_bound(k, 2);
  return s;
}

/// Worst case over partitions at each level of measured Givens counts,
/// summed over an n-qubit run.
inline std::size_t qubit_givens_worst_case(int n) {
  std::size_t total = 0;
  for (int k = 1; k < n; ++k) {
    std::size_t worst = 0;
    for (const auto& lambda : partitions_of(k, 2))
      worst = std::max(worst, cg_givens_count(lambda));
    total += worst;
  }
  return total;
}

struct QubitGateCount {
  int n = 0;
  BigInt two_level = 0;
  double delta = 0.0;
  long bits = 0;  // ceil(log2(1/delta))
  double clifford_t = 0.0;
  std::string notice = kModelNotice;
};

inline QubitGateCount qubit_gate_count(int n, const ModelParams& params = {}) {
  if (n < 2) throw ValidationError("qubit_gate_count needs n >= 2");
  if (!(params.epsilon > 0 && params.epsilon < 1)) throw ValidationError("epsilon must be in (0,1)");
  if (!(params.c > 0)) throw ValidationError("c must be positive");
  QubitGateCount g;
  g.n = n;
  g.two_level = qubit_two_level_closed(n);
  g.delta = params.epsilon / (params.c * double(n) * double(n));
  g.bits = static_cast<long>(std::ceil(std::log2(1.0 / g.delta)));
  g.clifford_t = g.two_level.convert_to<double>() * params.kappa * n * static_cast<double>(g.bits);
  return g;
}

struct QuditGateBound {
  int n = 0;
  int d = 2;
  BigInt m_sum = 0;           // sum_{k=1}^{n-1} d^2 (k+1)^(2d-2)
  double integral_bound = 0;  // d^2 ((n+1)^(2d-1) - 2^(2d-1)) / (2d-1)
  double delta = 0.0;
  double log_factor = 0.0;    // ceil(log2(1/delta)^p)
  double total = 0.0;         // M * n * log_factor
  std::string notice = kModelNotice;
};

inline QuditGateBound qudit_gate_bound(int n, int d, const ModelParams& params = {}) {
  if (n < 2) throw ValidationError("qudit_gate_bound needs n >= 2");
  if (d < 2) throw ValidationError("qudit_gate_bound needs d >= 2");
  if (!(params.p > 0)) throw ValidationError("p must be positive");
  if (!(params.epsilon > 0 && params.epsilon < 1)) throw ValidationError("epsilon must be in (0,1)");
  QuditGateBound q;
  q.n = n;
  q.d = d;
  for (int k = 1; k < n; ++k) q.m_sum += BigInt(d) * d * boost::multiprecision::pow(BigInt(k + 1), 2 * d - 2);
  const double e = 2.0 * d - 1.0;
  q.integral_bound = double(d) * d * (std::pow(n + 1.0, e) - std::pow(2.0, e)) / e;
  q.delta = params.epsilon / (params.c * d * std::pow(double(n), e));
  q.log_factor = std::ceil(std::pow(std::log2(1.0 / q.delta), params.p));
  q.total = q.m_sum.convert_to<double>() * n * q.log_factor;
  return q;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ValidationError("slope needs two points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

struct ScalingFit {
  double slope = 0.0;      // of estimate / log2(n/epsilon) against n
  double raw_slope = 0.0;  // of the estimate itself
};

/// Scaling of the qubit Clifford+T model, at powers of two from n_lo to n_hi.
inline ScalingFit qubit_scaling(int n_lo, int n_hi, const ModelParams& params = {}) {
  std::vector<double> xs, ys, raw;
  for (int n = n_lo; n <= n_hi; n *= 2) {
    const double est = qubit_gate_count(n, params).clifford_t;
    xs.push_back(n);
    raw.push_back(est);
    ys.push_back(est / std::log2(n / params.epsilon));
  }
  return {loglog_slope(xs, ys), loglog_slope(xs, raw)};
}

// ---------------------------------------------------------- accumulation

struct AccumulationCheck {
  int m = 0;
  double delta = 0.0;
  double operator_norm = 0.0;  // || prod U - prod V ||_op
  double trace_norm = 0.0;     // || prod U - prod V ||_1
  bool within_bound = false;   // operator_norm <= m * delta
};

/// M random unitaries, each perturbed by exp(i delta H) with ||H||_op = 1,
/// so every factor moves by at most delta in operator norm.
template <typename Rng>
AccumulationCheck accumulation_check(int m, double delta, Eigen::Index dim, Rng& rng) {
  CMatrix exact = CMatrix::Identity(dim, dim);
  CMatrix noisy = CMatrix::Identity(dim, dim);
  std::normal_distribution<double> normal;
  for (int i = 0; i < m; ++i) {
    CMatrix g(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r)
      for (Eigen::Index c = 0; c < dim; ++c) g(r, c) = {normal(rng), normal(rng)};
    Eigen::HouseholderQR<CMatrix> qr(g);
    CMatrix u = qr.householderQ();
    CMatrix h = g + g.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(h);
    const RVector ev = eig.eigenvalues() / eig.eigenvalues().cwiseAbs().maxCoeff();
    CVector phases(dim);
    for (Eigen::Index k = 0; k < dim; ++k) phases(k) = std::polar(1.0, delta * ev(k));
    CMatrix kick = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    exact = u * exact;
    noisy = u * kick * noisy;
  }
  Eigen::JacobiSVD<CMatrix> svd(exact - noisy);
  AccumulationCheck a;
  a.m = m;
  a.delta = delta;
  a.operator_norm = svd.singularValues()(0);
  a.trace_norm = svd.singularValues().sum();
  a.within_bound = a.operator_norm <= m * delta * (1 + 1e-12);
  return a;
}

}  // namespace schur
