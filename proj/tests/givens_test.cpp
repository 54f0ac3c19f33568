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

#include "schur/givens.hpp"

#include <gtest/gtest.h>

#include <random>

#include "schur/random.hpp"

namespace schur {
namespace {

TEST(Givens, IdentityNeedsNoRotations) {
  EXPECT_EQ(givens_count(CMatrix::Identity(6, 6)), 0u);
}

TEST(Givens, ReconstructsRandomUnitaries) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    CMatrix u = haar_unitary(8, rng);
    auto g = givens_decompose(u);
    EXPECT_EQ(g.rotations.size(), 28u);
    EXPECT_LT(max_abs(g.reconstruct() - u), 1e-8);
    for (const auto& r : g.rotations) {
      EXPECT_LT(r.lo, r.hi);
      EXPECT_LT(unitarity_error(r.embed(8)), 1e-12);
    }
  }
}

TEST(Givens, PermutationAndSparseInputs) {
  CMatrix p = CMatrix::Zero(4, 4);
  p(0, 1) = p(1, 0) = p(2, 3) = p(3, 2) = 1.0;
  auto g = givens_decompose(p);
  EXPECT_EQ(g.rotations.size(), 2u);
  EXPECT_LT(max_abs(g.reconstruct() - p), 1e-12);
}

TEST(Givens, RejectsNonUnitary) {
  CMatrix m = CMatrix::Identity(3, 3);
  m(0, 1) = 0.5;
  EXPECT_THROW(givens_decompose(m), ValidationError);
  EXPECT_THROW(givens_decompose(CMatrix::Zero(2, 3)), ValidationError);
}

}  // namespace
}  // namespace schur
