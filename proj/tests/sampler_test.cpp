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

#include "schur/sampler.hpp"

#include <gtest/gtest.h>

#include <random>

#include "schur/oracle.hpp"
#include "schur/random.hpp"

namespace schur {
namespace {

Stream basis_stream(int d, const std::vector<int>& digits) {
  Stream s;
  for (int i : digits) s.push_back(QuditInput::basis(d, i));
  return s;
}

Stream random_product(int n, int d, std::mt19937_64& rng, bool mixed) {
  Stream s;
  for (int i = 0; i < n; ++i) {
    if (mixed) s.push_back(QuditInput::mixed(random_density(d, 2, rng)));
    else s.push_back(QuditInput::pure(random_pure_state(d, rng)));
  }
  return s;
}

Stream maximally_mixed(int n, int d) {
  return Stream(n, QuditInput::mixed(CMatrix::Identity(d, d) / double(d)));
}

double marginal_gap(const BranchDistribution& dist, const WeakSchurProbs& oracle) {
  double gap = 0.0;
  for (const auto& [lambda, p] : oracle.by_lambda) {
    auto it = dist.marginal.find(lambda);
    gap = std::max(gap, std::abs(p - (it == dist.marginal.end() ? 0.0 : it->second)));
  }
  return gap;
}

double path_gap(const BranchDistribution& dist, const WeakSchurProbs& oracle) {
  double gap = 0.0;
  for (const auto& [path, p] : oracle.by_path) {
    auto it = dist.entries.find(path);
    gap = std::max(gap, std::abs(p - (it == dist.entries.end() ? 0.0 : it->second)));
  }
  return gap;
}

TEST(Step, SymmetricPairIsCertain) {
  auto st = StreamState::start(QuditInput::basis(2, 0));
  auto r = step(st, QuditInput::basis(2, 0));
  EXPECT_EQ(r.j, 0);
  EXPECT_NEAR(r.probability, 1.0, 1e-15);
  EXPECT_EQ(st.lambda, Partition({2, 0}));
}

TEST(Step, ZeroOneSplitsEvenly) {
  auto st = StreamState::start(QuditInput::basis(2, 0));
  auto r = step(st, QuditInput::basis(2, 1));
  ASSERT_EQ(r.block_probs.size(), 2u);
  EXPECT_NEAR(r.block_probs[0], 0.5, 1e-15);
  EXPECT_NEAR(r.block_probs[1], 0.5, 1e-15);
}

TEST(Step, MaximallyMixedFirstStep) {
  auto st = StreamState::start(QuditInput::mixed(CMatrix::Identity(2, 2) / 2.0));
  auto r = step(st, QuditInput::mixed(CMatrix::Identity(2, 2) / 2.0));
  EXPECT_NEAR(r.block_probs[0], 0.75, 1e-15);
  EXPECT_NEAR(r.block_probs[1], 0.25, 1e-15);
  EXPECT_TRUE(st.mixed);
}

TEST(Step, RejectsBadQudits) {
  auto st = StreamState::start(QuditInput::basis(2, 0));
  EXPECT_THROW(step(st, QuditInput::pure(CVector::Ones(2))), ValidationError);
  EXPECT_THROW(step(st, QuditInput::basis(3, 0)), ValidationError);
  CMatrix bad = CMatrix::Identity(2, 2);
  EXPECT_THROW(step(st, QuditInput::mixed(bad)), ValidationError);
}

TEST(Step, CollapseIsReported) {
  auto st = StreamState::start(QuditInput::basis(2, 0));
  st.amplitudes.setZero();  // corrupt on purpose
  EXPECT_THROW(step(st, QuditInput::basis(2, 0)), NumericalError);
}

TEST(RunStream, ZerosGiveOneRow) {
  for (int d = 2; d <= 3; ++d) {
    auto r = run_stream(basis_stream(d, std::vector<int>(6, 0)), 1);
    std::vector<int> parts(d, 0);
    parts[0] = 6;
    EXPECT_EQ(r.lambda, Partition(parts));
    EXPECT_EQ(r.path.to_string(), "0,0,0,0,0");
    for (double p : r.step_probabilities) EXPECT_NEAR(p, 1.0, 1e-12);
    EXPECT_EQ(r.ledger.records.size(), 5u);
  }
}

TEST(RunStream, DeterministicGivenSeed) {
  std::mt19937_64 rng(8);
  auto stream = random_product(8, 3, rng, false);
  auto a = run_stream(stream, 99, 4);
  auto b = run_stream(stream, 99, 4);
  EXPECT_EQ(a.path, b.path);
  EXPECT_EQ(a.step_probabilities, b.step_probabilities);
  EXPECT_EQ(a.tree.to_path(3), a.path);
}

TEST(RunStream, EmpiricalFrequencyForZeroOne) {
  auto stream = basis_stream(2, {0, 1});
  int sym = 0;
  const int trials = 100000;
  for (int s = 0; s < trials; ++s)
    if (run_stream(stream, static_cast<std::uint64_t>(s)).lambda == Partition({2, 0})) ++sym;
  EXPECT_NEAR(sym / double(trials), 0.5, 0.01);
}

TEST(RunStream, EarlyStopMatchesFreshRun) {
  std::mt19937_64 rng(21);
  auto stream = random_product(7, 2, rng, false);
  for (std::size_t k = 1; k <= 7; ++k) {
    Stream prefix(stream.begin(), stream.begin() + static_cast<long>(k));
    auto fresh = run_stream(prefix, 5);
    auto stopped = run_stream(stream, 5, 0, k);
    EXPECT_EQ(fresh.path, stopped.path);
    EXPECT_EQ(stopped.lambda.n(), static_cast<int>(k));
  }
  // and distributions: the first k steps of the full tree marginalize
  auto full = branch_distribution(stream);
  auto short_run = branch_distribution(Stream(stream.begin(), stream.begin() + 4));
  std::map<LatticePath, double> folded;
  for (const auto& [path, p] : full.entries) {
    std::vector<int> head(path.steps().begin(), path.steps().begin() + 3);
    folded[LatticePath(2, head)] += p;
  }
  for (const auto& [path, p] : short_run.entries) EXPECT_NEAR(folded[path], p, 1e-12);
}

TEST(StreamingSampler, PushInterface) {
  StreamingSampler s(2, 3);
  EXPECT_FALSE(s.push(QuditInput::basis(2, 1)).has_value());
  EXPECT_EQ(s.lambda(), Partition({1, 0}));
  auto r = s.push(QuditInput::basis(2, 1));
  ASSERT_TRUE(r.has_value());
  EXPECT_EQ(s.lambda(), Partition({2, 0}));
  EXPECT_EQ(s.qudits(), 2);
}

TEST(BranchDistribution, Examples) {
  auto zeros = branch_distribution(basis_stream(2, {0, 0, 0, 0}));
  ASSERT_EQ(zeros.entries.size(), 1u);
  EXPECT_EQ(zeros.entries.begin()->first.to_string(), "0,0,0");
  EXPECT_NEAR(zeros.entries.begin()->second, 1.0, 1e-12);

  auto mixed = branch_distribution(maximally_mixed(3, 2));
  EXPECT_NEAR(mixed.entries.at(LatticePath(2, {0, 0})), 0.5, 1e-12);
  EXPECT_NEAR(mixed.entries.at(LatticePath(2, {0, 1})), 0.25, 1e-12);
  EXPECT_NEAR(mixed.entries.at(LatticePath(2, {1, 0})), 0.25, 1e-12);
  EXPECT_NEAR(mixed.marginal.at(Partition({3, 0})), 0.5, 1e-12);
  EXPECT_NEAR(mixed.marginal.at(Partition({2, 1})), 0.5, 1e-12);
  EXPECT_LT(mixed.max_normalization_error, 1e-10);
}

TEST(BranchDistribution, CapAndPruning) {
  BranchOptions opt;
  opt.cap = 3;
  EXPECT_THROW(branch_distribution(maximally_mixed(6, 2), opt), LimitError);
  BranchOptions prune;
  prune.prune = 0.2;
  auto d = branch_distribution(maximally_mixed(4, 2), prune);
  EXPECT_GT(d.pruned, 0.0);
  EXPECT_NEAR(d.total() + d.pruned, 1.0, 1e-12);
}

TEST(BranchDistribution, AgreesWithOracleOnProductStreams) {
  std::mt19937_64 rng(1234);
  for (int d = 2; d <= 3; ++d) {
    for (int n = 2; n <= (d == 2 ? 6 : 4); ++n) {
      auto su = schur_transform(n, d);
      for (int trial = 0; trial < 4; ++trial) {
        auto stream = random_product(n, d, rng, trial % 2 == 1);
        auto dist = branch_distribution(stream);
        auto oracle = weak_schur_probs(stream_density(stream), su);
        EXPECT_LT(marginal_gap(dist, oracle), 1e-9) << "d=" << d << " n=" << n;
        EXPECT_LT(path_gap(dist, oracle), 1e-9) << "d=" << d << " n=" << n;
        EXPECT_LT(dist.max_normalization_error, 1e-10);
      }
    }
  }
}

TEST(FullState, Singlet) {
  CVector singlet = CVector::Zero(4);
  singlet(1) = 1 / std::sqrt(2.0);
  singlet(2) = -1 / std::sqrt(2.0);
  auto dist = run_full_state(singlet, 2);
  EXPECT_NEAR(dist.marginal.at(Partition({1, 1})), 1.0, 1e-12);
  EXPECT_EQ(dist.marginal.size(), 1u);
}

TEST(FullState, AgreesWithOracleOnEntangledStates) {
  std::mt19937_64 rng(77);
  CVector ghz = CVector::Zero(8);
  ghz(0) = ghz(7) = 1 / std::sqrt(2.0);
  {
    auto su = schur_transform(3, 2);
    EXPECT_LT(marginal_gap(run_full_state(ghz, 2), weak_schur_probs_pure(ghz, su)), 1e-9);
  }
  CVector singlet = CVector::Zero(4);
  singlet(1) = 1 / std::sqrt(2.0);
  singlet(2) = -1 / std::sqrt(2.0);
  CVector two = kron(singlet, singlet);
  EXPECT_LT(marginal_gap(run_full_state(two, 2), weak_schur_probs_pure(two, schur_transform(4, 2))),
            1e-9);
  for (int d = 2; d <= 3; ++d) {
    for (int n = 2; n <= (d == 2 ? 6 : 4); ++n) {
      auto su = schur_transform(n, d);
      CVector psi = random_pure_state(su.size(), rng);
      auto dist = run_full_state(psi, d);
      auto oracle = weak_schur_probs_pure(psi, su);
      EXPECT_LT(marginal_gap(dist, oracle), 1e-9);
      EXPECT_LT(path_gap(dist, oracle), 1e-9);
      CMatrix rho = random_density(su.size(), 2, rng);
      auto mdist = run_full_state(rho, d);
      auto moracle = weak_schur_probs(rho, su);
      EXPECT_LT(marginal_gap(mdist, moracle), 1e-9);
      EXPECT_LT(path_gap(mdist, moracle), 1e-9);
    }
  }
}

TEST(FullState, MatchesStreamingOnProducts) {
  std::mt19937_64 rng(5);
  auto stream = random_product(5, 2, rng, false);
  CVector psi = stream[0].vector();
  for (std::size_t i = 1; i < stream.size(); ++i) psi = kron(psi, stream[i].vector());
  auto a = run_full_state(psi, 2);
  auto b = branch_distribution(stream);
  for (const auto& [path, p] : b.entries) EXPECT_NEAR(a.entries.at(path), p, 1e-12);
}

TEST(FullState, Guardrails) {
  EXPECT_THROW(run_full_state(CVector(CVector::Unit(2048, 0)), 2), LimitError);
  EXPECT_THROW(run_full_state(CVector(CVector::Unit(6, 0)), 2), ValidationError);
  EXPECT_THROW(run_full_state(CVector(CVector::Ones(4)), 2), ValidationError);
}

TEST(Invariance, UnitaryAndPermutation) {
  std::mt19937_64 rng(9);
  for (int n = 3; n <= 5; ++n) {
    CVector psi = random_pure_state(Eigen::Index(1) << n, rng);
    CMatrix u = tensor_rep(haar_unitary(2, rng), n);
    auto a = run_full_state(psi, 2);
    auto b = run_full_state(CVector(u * psi), 2);
    for (const auto& [lambda, p] : a.marginal) EXPECT_NEAR(b.marginal[lambda], p, 1e-8);
  }
  auto stream = random_product(5, 2, rng, true);
  auto base = branch_distribution(stream);
  for (int trial = 0; trial < 5; ++trial) {
    Stream shuffled = stream;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    auto other = branch_distribution(shuffled);
    for (const auto& [lambda, p] : base.marginal) EXPECT_NEAR(other.marginal[lambda], p, 1e-9);
  }
}

TEST(Ledger, RecordsPerIteration) {
  auto r = run_stream(basis_stream(2, {0, 1, 0, 1, 1, 0}), 3);
  ASSERT_EQ(r.ledger.records.size(), 5u);
  for (std::size_t i = 0; i < r.ledger.records.size(); ++i) {
    const auto& rec = r.ledger.records[i];
    EXPECT_EQ(rec.k, static_cast<int>(i) + 1);
    EXPECT_EQ(rec.width, register_width(rec.k, 2));
    EXPECT_LE(BigInt(rec.givens), rec.iteration_bound);
  }
  EXPECT_LE(BigInt(r.ledger.total_givens()), r.ledger.total_iteration_bound());
}

// ---------------------------------------------------------------- registers

TEST(Register, FourQubitLayoutAtThreeBoxes) {
  // Reach lambda = (3,0) with |000>, then iterate k = 3 with |+>, forcing L = 1.
  RegisterState st = register_start(CVector::Unit(2, 0));
  register_step(st, CVector::Unit(2, 0));
  register_step(st, CVector::Unit(2, 0));
  ASSERT_EQ(st.lambda, Partition({3, 0}));
  ASSERT_EQ(st.q.size(), 8);
  const CVector plus = CVector::Ones(2) / std::sqrt(2.0);
  RegisterEvent ev = register_step(st, plus, 1);
  EXPECT_EQ(ev.width, 4);
  ASSERT_EQ(ev.after_cg.size(), 16);
  EXPECT_EQ(ev.block_dims, (std::vector<Eigen::Index>{5, 3}));
  // after the CG: block 0 in 0..4, block 1 in 5..7, zeros beyond
  EXPECT_LT(ev.after_cg.tail(8).cwiseAbs().maxCoeff(), 1e-15);
  // after the rearrangement: block 1 starts at 8, so L = 1 selects (3,1)
  for (int r = 0; r < 3; ++r) EXPECT_EQ(ev.rearrangement[5 + r], 8 + r);
  for (int r = 0; r < 5; ++r) EXPECT_EQ(ev.rearrangement[r], r);
  EXPECT_LT(ev.after_rearrange.segment(5, 3).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT(ev.after_rearrange.segment(11, 5).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(st.lambda, Partition({3, 1}));
  EXPECT_TRUE(ev.removal);
  EXPECT_EQ(ev.width_after, 3);
  // law of L equals the abstract step
  auto abstract = StreamState::start(QuditInput::basis(2, 0));
  step(abstract, QuditInput::basis(2, 0));
  step(abstract, QuditInput::basis(2, 0));
  auto r = step(abstract, QuditInput::pure(plus));
  EXPECT_NEAR(ev.l_probs[0], r.block_probs[0], 1e-10);
  EXPECT_NEAR(ev.l_probs[1], r.block_probs[1], 1e-10);
}

TEST(Register, WidthsAndRemovalsFollowMemoryProfile) {
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 12; ++n) {
    std::vector<CVector> qubits;
    for (int i = 0; i < n; ++i) qubits.push_back(random_pure_state(2, rng));
    auto run = run_register_stream(qubits, 7);
    auto profile = memory_profile(n, 2);
    ASSERT_EQ(run.events.size(), profile.widths.size());
    for (std::size_t i = 0; i < run.events.size(); ++i) {
      const int k = static_cast<int>(i) + 1;
      EXPECT_EQ(run.events[i].width, profile.widths[i]);
      EXPECT_EQ(run.events[i].width, ceil_log2(2L * k + 4));
      EXPECT_EQ(run.events[i].removal, profile.removals[i]);
      EXPECT_EQ(run.events[i].removal, ceil_log2(2L * k + 4) != ceil_log2(k + 3L));
      if (run.events[i].step6) {
        EXPECT_FALSE(run.events[i].removal);
        EXPECT_EQ(run.events[i].j, 1);
      }
    }
    EXPECT_EQ(run.q.size(), Eigen::Index(1) << ceil_log2(n + 2L));
  }
}

TEST(Register, SameLawAsAbstractMode) {
  std::mt19937_64 rng(44);
  for (int n = 2; n <= 6; ++n) {
    for (int trial = 0; trial < 3; ++trial) {
      std::vector<CVector> qubits;
      Stream stream;
      for (int i = 0; i < n; ++i) {
        qubits.push_back(random_pure_state(2, rng));
        stream.push_back(QuditInput::pure(qubits.back()));
      }
      auto reg = register_branch_distribution(qubits);
      auto abs = branch_distribution(stream);
      ASSERT_EQ(reg.entries.size(), abs.entries.size());
      for (const auto& [path, p] : abs.entries) EXPECT_NEAR(reg.entries.at(path), p, 1e-10);
      // sampled trajectories coincide under the same seed
      auto a = run_register_stream(qubits, 100 + trial);
      auto b = run_stream(stream, 100 + trial);
      EXPECT_EQ(a.path, b.path);
    }
  }
}

}  // namespace
}  // namespace schur
