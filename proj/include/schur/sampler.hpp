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

// Streaming weak Schur sampling. One qudit is coupled in per step with the
// CG transform of the current partition and the block index j is measured.
//
// Modes:
//  * step / run_stream / StreamingSampler: one sampled trajectory, with the
//    state stored as amplitudes (pure) or a density matrix (mixed) on Q_lambda;
//  * branch_distribution: every measurement branch of a product stream;
//  * run_full_state: the same maps applied to an arbitrary n-qudit state,
//    which covers entangled inputs;
//  * register_step / run_register_stream: qubits only, on an explicit
//    register of ceil(log2(2k+4)) qubits with an L qubit holding j.

#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "schur/cg.hpp"
#include "schur/common.hpp"
#include "schur/partitions.hpp"
#include "schur/resources.hpp"

namespace schur {

inline constexpr double kCollapseFloor = 1e-12;
inline constexpr double kDefaultPrune = 1e-12;
inline constexpr std::size_t kDefaultBranchCap = 1000000;

// ------------------------------------------------------------------ inputs

/// One stream element: a pure state or a density matrix on C^d.
class QuditInput {
 public:
  static QuditInput pure(CVector psi) {
    QuditInput q;
    q.mixed_ = false;
    q.psi_ = std::move(psi);
    return q;
  }
  static QuditInput mixed(CMatrix rho) {
    QuditInput q;
    q.mixed_ = true;
    q.rho_ = std::move(rho);
    return q;
  }
  static QuditInput basis(int d, int i) { return pure(CVector::Unit(d, i)); }

  bool is_mixed() const { return mixed_; }
  int d() const { return static_cast<int>(mixed_ ? rho_.rows() : psi_.size()); }
  const CVector& vector() const { return psi_; }
  CMatrix density() const { return mixed_ ? rho_ : CMatrix(psi_ * psi_.adjoint()); }

  /// Throws ValidationError unless this is a normalized state on C^d.
  void validate(int d, double tol = 1e-9) const {
    if (mixed_) {
      if (rho_.rows() != d || rho_.cols() != d)
        throw ValidationError("density matrix is not " + std::to_string(d) + "x" + std::to_string(d));
      if (max_abs(rho_ - rho_.adjoint()) > tol) throw ValidationError("density matrix is not Hermitian");
      if (std::abs(rho_.trace() - cplx(1.0)) > tol) throw ValidationError("density matrix trace is not 1");
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(rho_, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < -tol) throw ValidationError("density matrix is not PSD");
    } else {
      if (psi_.size() != d) throw ValidationError("state has dimension " + std::to_string(psi_.size()) +
                                                  ", expected " + std::to_string(d));
      if (std::abs(psi_.norm() - 1.0) > tol) throw ValidationError("state is not normalized");
    }
  }

 private:
  bool mixed_ = false;
  CVector psi_;
  CMatrix rho_;
};

using Stream = std::vector<QuditInput>;

/// Validates every element; the message names the offending index.
inline void validate_stream(const Stream& stream, int d) {
  if (stream.empty()) throw ValidationError("stream is empty");
  for (std::size_t i = 0; i < stream.size(); ++i) {
    try {
      stream[i].validate(d);
    } catch (const ValidationError& e) {
      throw ValidationError("stream element " + std::to_string(i) + ": " + e.what());
    }
  }
}

// --------------------------------------------------------------------- rng

/// Seeded from (seed, trial) through std::seed_seq; uniform draws take the
/// top 53 bits of a 64-bit Mersenne twister output.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed = 0, std::uint64_t trial = 0) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    engine_.seed(seq);
  }
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

/// Inverse CDF over j ascending. Zero-probability blocks are never chosen.
inline std::size_t sample_index(const std::vector<double>& probs, double u) {
  double total = 0.0;
  for (double p : probs) total += p;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = i;
    acc += probs[i];
    if (u * total < acc) return i;
  }
  return last_positive;
}

// ------------------------------------------------------------------- state

/// The measured decisions of a run: one node per iteration. Serializes to
/// the step sequence of a lattice path.
struct PartTree {
  struct Node {
    int k = 0;
    Partition before;
    int j = 0;
    double probability = 0.0;
  };
  std::vector<Node> nodes;

  std::vector<int> steps() const {
    std::vector<int> s;
    for (const auto& node : nodes) s.push_back(node.j);
    return s;
  }
  LatticePath to_path(int d) const { return LatticePath(d, steps()); }
};

struct StreamState {
  Partition lambda;
  bool mixed = false;
  CVector amplitudes;  // pure mode
  CMatrix density;     // mixed mode
  LatticePath path;
  PartTree tree;
  StreamRng rng;
  ResourceLedger ledger;

  int d() const { return lambda.d(); }

  /// State after the first qudit: lambda = (1), Q_(1) = C^d in the
  /// computational basis.
  static StreamState start(const QuditInput& first, std::uint64_t seed = 0,
                           std::uint64_t trial = 0, const ModelParams& params = {}) {
    const int d = first.d();
    first.validate(d);
    StreamState s;
    s.lambda = Partition::unit(d);
    s.mixed = first.is_mixed();
    if (s.mixed) s.density = first.density();
    else s.amplitudes = first.vector();
    s.path = LatticePath(d, {});
    s.rng = StreamRng(seed, trial);
    s.ledger.d = d;
    s.ledger.n = 1;
    s.ledger.params = params;
    return s;
  }

  void make_mixed() {
    if (mixed) return;
    density = amplitudes * amplitudes.adjoint();
    amplitudes = CVector();
    mixed = true;
  }

  void check_invariants(double tol = 1e-9) const {
    const auto dim = static_cast<Eigen::Index>(dim_unitary_size(lambda));
    if (path.end() != lambda || static_cast<int>(path.steps().size()) != lambda.n() - 1) {
      throw NumericalError("path " + path.to_string() + " does not replay to " + lambda.to_string());
    }
    if (mixed) {
      if (density.rows() != dim) throw NumericalError("density has the wrong size");
      if (std::abs(density.trace() - cplx(1.0)) > tol) throw NumericalError("trace drifted from 1");
      if (max_abs(density - density.adjoint()) > tol) throw NumericalError("density lost hermiticity");
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(density, Eigen::EigenvaluesOnly);
      if (eig.eigenvalues().minCoeff() < -tol) throw NumericalError("density lost positivity");
    } else {
      if (amplitudes.size() != dim) throw NumericalError("amplitudes have the wrong size");
      if (std::abs(amplitudes.norm() - 1.0) > tol) throw NumericalError("norm drifted from 1");
    }
  }
};

struct StepResult {
  int j = 0;
  double probability = 0.0;
  std::vector<int> block_js;         // valid j, ascending
  std::vector<double> block_probs;   // matching probabilities
};

namespace detail {

/// Block probabilities of a coupled state, j ascending.
inline std::vector<double> block_probabilities(const CGTransform& t, const CVector* v,
                                               const CMatrix* rho) {
  std::vector<double> probs;
  for (const auto& b : t.blocks) {
    if (v) probs.push_back(v->segment(b.offset, b.dim).squaredNorm());
    else probs.push_back(rho->block(b.offset, b.offset, b.dim, b.dim).trace().real());
  }
  return probs;
}

}  // namespace detail

/// One iteration: couple the qudit in, measure j, collapse.
inline StepResult step(StreamState& state, const QuditInput& qudit) {
  const int d = state.d();
  qudit.validate(d);
  auto t = cg_transform(state.lambda);
  const int k = state.lambda.n();

  StepResult out;
  CVector coupled;
  CMatrix coupled_rho;
  if (qudit.is_mixed()) state.make_mixed();
  if (state.mixed) {
    coupled_rho = t->matrix * kron(state.density, qudit.density()) * t->matrix.adjoint();
    out.block_probs = detail::block_probabilities(*t, nullptr, &coupled_rho);
  } else {
    coupled = t->matrix * kron(state.amplitudes, qudit.vector());
    out.block_probs = detail::block_probabilities(*t, &coupled, nullptr);
  }
  for (const auto& b : t->blocks) out.block_js.push_back(b.j);

  double max_p = 0.0;
  for (double p : out.block_probs) max_p = std::max(max_p, p);
  if (max_p < kCollapseFloor) {
    throw NumericalError("numerical collapse: every block probability is below 1e-12 at k=" +
                         std::to_string(k));
  }
  const std::size_t pick = sample_index(out.block_probs, state.rng.uniform());
  const CGBlock& b = t->blocks[pick];
  out.j = b.j;
  out.probability = out.block_probs[pick];

  if (state.mixed) {
    state.density = coupled_rho.block(b.offset, b.offset, b.dim, b.dim) / out.probability;
    state.density = (0.5 * (state.density + state.density.adjoint())).eval();
  } else {
    state.amplitudes = coupled.segment(b.offset, b.dim) / std::sqrt(out.probability);
  }
  state.ledger.records.push_back(make_record(k, state.lambda));
  state.ledger.n = k + 1;
  state.tree.nodes.push_back({k, state.lambda, b.j, out.probability});
  state.lambda = b.target;
  state.path = state.path.extended(b.j);
  state.check_invariants();
  return out;
}

/// Push-based driver: feed qudits one at a time, read lambda at any point.
class StreamingSampler {
 public:
  StreamingSampler(int d, std::uint64_t seed, std::uint64_t trial = 0,
                   const ModelParams& params = {})
      : d_(d), seed_(seed), trial_(trial), params_(params) {
    if (d < 2) throw ValidationError("d must be at least 2");
  }

  /// Returns the step outcome, or nothing for the very first qudit.
  std::optional<StepResult> push(const QuditInput& qudit) {
    qudit.validate(d_);
    if (!state_) {
      state_ = StreamState::start(qudit, seed_, trial_, params_);
      return std::nullopt;
    }
    return step(*state_, qudit);
  }

  bool started() const { return state_.has_value(); }
  int qudits() const { return state_ ? state_->lambda.n() : 0; }
  const StreamState& state() const {
    if (!state_) throw ValidationError("no qudit has been pushed");
    return *state_;
  }
  const Partition& lambda() const { return state().lambda; }
  const LatticePath& path() const { return state().path; }

 private:
  int d_;
  std::uint64_t seed_, trial_;
  ModelParams params_;
  std::optional<StreamState> state_;
};

struct RunResult {
  Partition lambda;
  LatticePath path;
  PartTree tree;
  bool mixed = false;
  CVector amplitudes;
  CMatrix density;
  ResourceLedger ledger;
  std::vector<double> step_probabilities;
};

/// Runs the first `stop_after` qudits of the stream (all when unset).
inline RunResult run_stream(const Stream& stream, std::uint64_t seed, std::uint64_t trial = 0,
                            std::optional<std::size_t> stop_after = std::nullopt,
                            const ModelParams& params = {}) {
  if (stream.empty()) throw ValidationError("stream is empty");
  const int d = stream.front().d();
  validate_stream(stream, d);
  const std::size_t n = stop_after ? std::min(*stop_after, stream.size()) : stream.size();
  if (n < 1) throw ValidationError("need at least one qudit");
  StreamingSampler sampler(d, seed, trial, params);
  RunResult r;
  for (std::size_t i = 0; i < n; ++i) {
    auto s = sampler.push(stream[i]);
    if (s) r.step_probabilities.push_back(s->probability);
  }
  const StreamState& st = sampler.state();
  r.lambda = st.lambda;
  r.path = st.path;
  r.tree = st.tree;
  r.mixed = st.mixed;
  r.amplitudes = st.amplitudes;
  r.density = st.density;
  r.ledger = st.ledger;
  r.ledger.n = static_cast<int>(n);
  return r;
}

// --------------------------------------------------------------- branches

struct BranchDistribution {
  int n = 0;
  int d = 2;
  std::map<LatticePath, double> entries;
  std::map<Partition, double> marginal;
  double pruned = 0.0;
  std::size_t branches = 0;
  double max_normalization_error = 0.0;  // per-node, before pruning

  double total() const {
    double s = 0.0;
    for (const auto& [p, v] : entries) s += v;
    return s;
  }
};

struct BranchOptions {
  double prune = kDefaultPrune;
  std::size_t cap = kDefaultBranchCap;
};

namespace detail {

inline void record_leaf(BranchDistribution& dist, const LatticePath& path, double p,
                        std::size_t cap) {
  if (++dist.branches > cap) {
    throw LimitError("branch count exceeds cap of " + std::to_string(cap));
  }
  dist.entries[path] += p;
  dist.marginal[path.end()] += p;
}

inline void check_branch_options(const BranchOptions& opt) {
  if (!(opt.prune >= 0.0)) throw ValidationError("prune threshold must be non-negative");
  if (opt.cap < 1) throw ValidationError("branch cap must be positive");
}

}  // namespace detail

/// Exhaustive enumeration over all measurement outcomes of a product stream,
/// carrying unnormalized states depth first.
inline BranchDistribution branch_distribution(const Stream& stream, const BranchOptions& opt = {}) {
  if (stream.empty()) throw ValidationError("stream is empty");
  detail::check_branch_options(opt);
  const int d = stream.front().d();
  validate_stream(stream, d);
  bool mixed = false;
  for (const auto& q : stream) mixed = mixed || q.is_mixed();

  BranchDistribution dist;
  dist.n = static_cast<int>(stream.size());
  dist.d = d;
  const std::size_t n = stream.size();

  std::function<void(const Partition&, const LatticePath&, const CVector&, const CMatrix&, double)>
      visit = [&](const Partition& lambda, const LatticePath& path, const CVector& v,
                  const CMatrix& rho, double weight) {
        const std::size_t k = static_cast<std::size_t>(lambda.n());
        if (k == n) {
          detail::record_leaf(dist, path, weight, opt.cap);
          return;
        }
        auto t = cg_transform(lambda);
        const QuditInput& q = stream[k];
        CVector coupled;
        CMatrix coupled_rho;
        if (mixed) {
          coupled_rho = t->matrix * kron(rho, q.density()) * t->matrix.adjoint();
        } else {
          coupled = t->matrix * kron(v, q.vector());
        }
        auto probs = detail::block_probabilities(*t, mixed ? nullptr : &coupled,
                                                 mixed ? &coupled_rho : nullptr);
        double sum = 0.0;
        for (double p : probs) sum += p;
        dist.max_normalization_error =
            std::max(dist.max_normalization_error, std::abs(sum - weight) / std::max(weight, 1e-300));
        for (std::size_t i = 0; i < t->blocks.size(); ++i) {
          const CGBlock& b = t->blocks[i];
          if (probs[i] < opt.prune || probs[i] <= 0.0) {
            dist.pruned += std::max(probs[i], 0.0);
            continue;
          }
          if (mixed) {
            visit(b.target, path.extended(b.j), CVector(),
                  coupled_rho.block(b.offset, b.offset, b.dim, b.dim), probs[i]);
          } else {
            visit(b.target, path.extended(b.j), coupled.segment(b.offset, b.dim), CMatrix(),
                  probs[i]);
          }
        }
      };

  const QuditInput& first = stream.front();
  if (mixed) visit(Partition::unit(d), LatticePath(d, {}), CVector(), first.density(), 1.0);
  else visit(Partition::unit(d), LatticePath(d, {}), first.vector(), CMatrix(), 1.0);
  return dist;
}

/// The same maps on a full n-qudit state. A branch at level k holds
/// dim Q_lambda * d^(n-k) numbers indexed g * d^(n-k) + t; the CG transform
/// acts as U (x) I on the leading (g, next qudit) index.
inline BranchDistribution run_full_state_impl(const CVector* psi, const CMatrix* rho, int n,
                                              int d, const BranchOptions& opt) {
  detail::check_branch_options(opt);
  BranchDistribution dist;
  dist.n = n;
  dist.d = d;

  auto remaining = [&](int k) {
    Eigen::Index r = 1;
    for (int i = 0; i < n - k; ++i) r *= d;
    return r;
  };

  std::function<void(const Partition&, const LatticePath&, const CVector&, const CMatrix&, double)>
      visit = [&](const Partition& lambda, const LatticePath& path, const CVector& v,
                  const CMatrix& r, double weight) {
        const int k = lambda.n();
        if (k == n) {
          detail::record_leaf(dist, path, weight, opt.cap);
          return;
        }
        auto t = cg_transform(lambda);
        const Eigen::Index rest = remaining(k + 1);
        double sum = 0.0;
        std::vector<double> probs;
        std::vector<CVector> vs;
        std::vector<CMatrix> rs;
        for (const auto& b : t->blocks) {
          // rows of U for this block, tensored with the untouched qudits
          const CMatrix ub = t->matrix.middleRows(b.offset, b.dim);
          if (psi) {
            Eigen::Map<const CMatrix> m(v.data(), rest, t->size());
            CMatrix out = m * ub.transpose();  // (rest x dim), column-major = q * rest + t'
            CVector flat = Eigen::Map<CVector>(out.data(), out.size());
            probs.push_back(flat.squaredNorm());
            vs.push_back(std::move(flat));
          } else {
            const CMatrix big = kron(ub, CMatrix::Identity(rest, rest));
            CMatrix out = big * r * big.adjoint();
            probs.push_back(out.trace().real());
            rs.push_back(std::move(out));
          }
          sum += probs.back();
        }
        dist.max_normalization_error =
            std::max(dist.max_normalization_error, std::abs(sum - weight) / std::max(weight, 1e-300));
        for (std::size_t i = 0; i < t->blocks.size(); ++i) {
          const CGBlock& b = t->blocks[i];
          if (probs[i] < opt.prune || probs[i] <= 0.0) {
            dist.pruned += std::max(probs[i], 0.0);
            continue;
          }
          visit(b.target, path.extended(b.j), psi ? vs[i] : CVector(), psi ? CMatrix() : rs[i],
                probs[i]);
        }
      };
  if (psi) visit(Partition::unit(d), LatticePath(d, {}), *psi, CMatrix(), 1.0);
  else visit(Partition::unit(d), LatticePath(d, {}), CVector(), *rho, 1.0);
  return dist;
}

inline int infer_qudits(Eigen::Index dim, int d, std::size_t max_dim) {
  if (d < 2) throw ValidationError("d must be at least 2");
  int n = 0;
  Eigen::Index p = 1;
  while (p < dim) {
    p *= d;
    ++n;
  }
  if (p != dim || n < 1) {
    throw ValidationError("state dimension " + std::to_string(dim) + " is not a power of d=" +
                          std::to_string(d));
  }
  if (static_cast<std::size_t>(dim) > max_dim) {
    throw LimitError("state dimension " + std::to_string(dim) + " exceeds limit " +
                     std::to_string(max_dim));
  }
  return n;
}

inline BranchDistribution run_full_state(const CVector& psi, int d, const BranchOptions& opt = {},
                                         std::size_t max_dim = 1024) {
  const int n = infer_qudits(psi.size(), d, max_dim);
  if (std::abs(psi.norm() - 1.0) > 1e-9) throw ValidationError("state is not normalized");
  return run_full_state_impl(&psi, nullptr, n, d, opt);
}

inline BranchDistribution run_full_state(const CMatrix& rho, int d, const BranchOptions& opt = {},
                                         std::size_t max_dim = 1024) {
  if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
  const int n = infer_qudits(rho.rows(), d, max_dim);
  if (std::abs(rho.trace() - cplx(1.0)) > 1e-9) throw ValidationError("state trace is not 1");
  if (max_abs(rho - rho.adjoint()) > 1e-9) throw ValidationError("state is not Hermitian");
  return run_full_state_impl(nullptr, &rho, n, d, opt);
}

/// Product state of a stream as one vector (pure) or density (mixed).
inline CMatrix stream_density(const Stream& stream) {
  CMatrix out = stream.front().density();
  for (std::size_t i = 1; i < stream.size(); ++i) out = kron(out, stream[i].density());
  return out;
}

// ------------------------------------------------------------- registers

/// Register-level qubit mode. At iteration k the register holds
/// W = ceil(log2(2k+4)) qubits: Q (W-1 qubits, padded) and the incoming qubit
/// as least significant. After the CG transform the rearranging permutation
/// places block j = 1 at 2^(W-1), so the most significant qubit L equals j.
struct RegisterState {
  Partition lambda = Partition::unit(2);
  CVector q;  // 2^(width - 1) amplitudes, exact zeros past dim Q_lambda
  LatticePath path = LatticePath(2, {});
  StreamRng rng;
};

struct RegisterEvent {
  int k = 0;
  int width = 0;
  Partition before;
  std::vector<Eigen::Index> block_dims;
  CVector after_cg;          // 2^W amplitudes
  CVector after_rearrange;   // 2^W amplitudes
  std::vector<Eigen::Index> rearrangement;  // position of each coordinate
  std::vector<double> l_probs;               // Pr[L = 0], Pr[L = 1]
  int j = 0;
  double probability = 0.0;
  bool removal = false;
  bool step6 = false;
  int width_after = 0;  // qubits kept for the next iteration
};

inline int ceil_log2(long x) {
  int w = 0;
  long p = 1;
  while (p < x) {
    p *= 2;
    ++w;
  }
  return w;
}

inline RegisterState register_start(const CVector& first, std::uint64_t seed = 0,
                                    std::uint64_t trial = 0) {
  QuditInput::pure(first).validate(2);
  RegisterState s;
  s.rng = StreamRng(seed, trial);
  // iteration 1 starts with ceil(log2 3) = 2 Q qubits
  s.q = CVector::Zero(4);
  s.q.head(2) = first;
  return s;
}

/// The rearranging permutation for a W-qubit register: block 0 stays at the
/// bottom, block 1 moves to 2^(W-1), padding fills the remaining slots in
/// order. Returns target position per source coordinate.
inline std::vector<Eigen::Index> rearrangement(const CGTransform& t, Eigen::Index size) {
  const Eigen::Index half = size / 2;
  std::vector<Eigen::Index> target(size, -1);
  std::vector<bool> used(size, false);
  for (const auto& b : t.blocks) {
    const Eigen::Index base = b.j == 0 ? 0 : half;
    for (Eigen::Index r = 0; r < b.dim; ++r) {
      target[b.offset + r] = base + r;
      used[base + r] = true;
    }
  }
  Eigen::Index free = 0;
  for (Eigen::Index i = 0; i < size; ++i) {
    if (target[i] >= 0) continue;
    while (used[free]) ++free;
    target[i] = free;
    used[free] = true;
  }
  return target;
}

inline CMatrix permutation_matrix(const std::vector<Eigen::Index>& target) {
  const auto n = static_cast<Eigen::Index>(target.size());
  CMatrix p = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) p(target[i], i) = 1.0;
  return p;
}

/// Dense 2^W operators for iteration k from lambda: the embedded CG (identity
/// on padding) followed by the rearranging permutation.
inline CMatrix register_operator(const Partition& lambda, int width,
                                 std::vector<Eigen::Index>* perm = nullptr,
                                 CMatrix* embedded_out = nullptr) {
  auto t = cg_transform(lambda);
  const Eigen::Index size = Eigen::Index(1) << width;
  CMatrix embedded = CMatrix::Identity(size, size);
  embedded.topLeftCorner(t->size(), t->size()) = t->matrix;
  auto target = rearrangement(*t, size);
  if (perm) *perm = target;
  if (embedded_out) *embedded_out = embedded;
  return permutation_matrix(target) * embedded;
}

/// Executes one iteration and either samples L (outcome = nullopt) or
/// follows the forced outcome (used for branch enumeration).
inline RegisterEvent register_step(RegisterState& st, const CVector& qubit,
                                   std::optional<int> forced = std::nullopt,
                                   bool normalize = true) {
  const int k = st.lambda.n();
  const int width = ceil_log2(2L * k + 4);
  if (st.q.size() != (Eigen::Index(1) << (width - 1))) {
    throw NumericalError("register width mismatch at k=" + std::to_string(k));
  }
  if (qubit.size() != 2) throw ValidationError("register mode needs qubits");
  if (normalize && std::abs(qubit.norm() - 1.0) > 1e-9) throw ValidationError("qubit is not normalized");

  RegisterEvent ev;
  ev.k = k;
  ev.width = width;
  ev.before = st.lambda;
  auto t = cg_transform(st.lambda);
  for (const auto& b : t->blocks) ev.block_dims.push_back(b.dim);

  const Eigen::Index size = Eigen::Index(1) << width;
  const Eigen::Index half = size / 2;
  CMatrix embedded;
  const CMatrix op = register_operator(st.lambda, width, &ev.rearrangement, &embedded);
  const CVector reg = kron(st.q, qubit);
  ev.after_cg = embedded * reg;
  ev.after_rearrange = op * reg;

  const double total = ev.after_rearrange.squaredNorm();
  ev.l_probs = {ev.after_rearrange.head(half).squaredNorm(),
                ev.after_rearrange.tail(half).squaredNorm()};
  if (std::max(ev.l_probs[0], ev.l_probs[1]) < kCollapseFloor * std::max(total, 1e-300)) {
    throw NumericalError("numerical collapse in register mode at k=" + std::to_string(k));
  }
  int j;
  if (forced) {
    j = *forced;
  } else {
    j = static_cast<int>(sample_index(ev.l_probs, st.rng.uniform()));
  }
  ev.j = j;
  ev.probability = ev.l_probs[j] / (normalize ? total : 1.0);
  const CGBlock* block = t->block_for(j);
  if (!block) throw NumericalError("L outcome selects an empty block");

  CVector kept = (j == 0 ? ev.after_rearrange.head(half) : ev.after_rearrange.tail(half));
  if (normalize) kept /= std::sqrt(ev.l_probs[j]);
  // padded coordinates must be exactly zero before anything is dropped
  if (half > block->dim) {
    const double pad = kept.tail(half - block->dim).cwiseAbs().maxCoeff();
    if (pad > 1e-12) {
      throw NumericalError("padding amplitude " + std::to_string(pad) + " at k=" + std::to_string(k));
    }
  }
  ev.removal = ceil_log2(2L * k + 4) != ceil_log2(k + 3L);
  if (ev.removal) {
    st.q = kept;  // L discarded, W-1 qubits remain
  } else {
    // L stays in the register as the top Q qubit; step 6 clears it for j = 1
    st.q = CVector::Zero(size);
    st.q.head(half) = kept;
    ev.step6 = j == 1;
  }
  ev.width_after = static_cast<int>(std::lround(std::log2(static_cast<double>(st.q.size()))));
  st.lambda = block->target;
  st.path = st.path.extended(j);
  return ev;
}

struct RegisterRun {
  Partition lambda;
  LatticePath path;
  CVector q;
  std::vector<RegisterEvent> events;
};

inline RegisterRun run_register_stream(const std::vector<CVector>& qubits, std::uint64_t seed,
                                       std::uint64_t trial = 0) {
  if (qubits.empty()) throw ValidationError("stream is empty");
  RegisterState st = register_start(qubits.front(), seed, trial);
  RegisterRun run;
  for (std::size_t i = 1; i < qubits.size(); ++i) run.events.push_back(register_step(st, qubits[i]));
  run.lambda = st.lambda;
  run.path = st.path;
  run.q = st.q;
  return run;
}

/// Branch enumeration through the register circuit (unnormalized states).
inline BranchDistribution register_branch_distribution(const std::vector<CVector>& qubits,
                                                       const BranchOptions& opt = {}) {
  if (qubits.empty()) throw ValidationError("stream is empty");
  detail::check_branch_options(opt);
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    try {
      QuditInput::pure(qubits[i]).validate(2);
    } catch (const ValidationError& e) {
      throw ValidationError("stream element " + std::to_string(i) + ": " + e.what());
    }
  }
  BranchDistribution dist;
  dist.n = static_cast<int>(qubits.size());
  dist.d = 2;
  std::function<void(RegisterState, double)> visit = [&](RegisterState st, double weight) {
    const auto k = static_cast<std::size_t>(st.lambda.n());
    if (k == qubits.size()) {
      detail::record_leaf(dist, st.path, weight, opt.cap);
      return;
    }
    double sum = 0.0;
    for (int j = 0; j < 2; ++j) {
      if (!can_add_box(st.lambda, j)) continue;
      RegisterState child = st;
      RegisterEvent ev = register_step(child, qubits[k], j, false);
      const double p = ev.probability;
      sum += p;
      if (p < opt.prune || p <= 0.0) {
        dist.pruned += std::max(p, 0.0);
        continue;
      }
      visit(std::move(child), p);
    }
    dist.max_normalization_error =
        std::max(dist.max_normalization_error, std::abs(sum - weight) / std::max(weight, 1e-300));
  };
  visit(register_start(qubits.front()), 1.0);
  return dist;
}

}  // namespace schur
