//
// Copyright 2026 The robust_cp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "robust_cp/random/philox.h"

#include <cstdint>
#include <set>

#include "gmock/gmock.h"
#include "gtest/gtest.h"

namespace robust_cp {
namespace {

using ::testing::ElementsAre;

// Reference outputs from numpy.random.Philox (4x64, 10 rounds).
TEST(PhiloxTest, ZeroKeyZeroCounter) {
  EXPECT_THAT(Philox4x64::Generate({0, 0, 0, 0}, {0, 0}),
              ElementsAre(0x16554d9eca36314cULL, 0xdb20fe9d672d0fdcULL,
                          0xd7e772cee186176bULL, 0x7e68b68aec7ba23bULL));
}

TEST(PhiloxTest, MatchesNumpyStream) {
  // numpy with key [123, 456] and counter [0, 7, 9, 0] increments before
  // producing, so its first two blocks are counters [1, 7, 9, 0], [2, 7, 9, 0].
  EXPECT_THAT(Philox4x64::Generate({1, 7, 9, 0}, {123, 456}),
              ElementsAre(0x08bf6ddebbd4989eULL, 0x854564be7562f88fULL,
                          0x58def9c62c3d4014ULL, 0xc7205e8cccd31cf1ULL));
  EXPECT_THAT(Philox4x64::Generate({2, 7, 9, 0}, {123, 456}),
              ElementsAre(0xe543b88f03579765ULL, 0x5525636db99cc9a0ULL,
                          0xdfe3e720c6af5f6bULL, 0x26c6dc1a80252379ULL));
}

TEST(PhiloxTest, StreamsAreReproducible) {
  Philox4x64 a(42, 3, 5);
  Philox4x64 b(42, 3, 5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(PhiloxTest, DistinctStreamsDiffer) {
  std::set<uint64_t> first_words;
  for (uint64_t a = 0; a < 8; ++a) {
    for (uint64_t b = 0; b < 8; ++b) first_words.insert(Philox4x64(1, a, b)());
  }
  first_words.insert(Philox4x64(2, 0, 0)());
  EXPECT_EQ(first_words.size(), 65u);
}

TEST(PhiloxTest, UniformInUnitInterval) {
  Philox4x64 rng(9, 0, 0);
  double sum = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.Uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(PhiloxTest, DeriveSeedSeparatesPurposes) {
  EXPECT_NE(DeriveSeed(1, 0, 0), DeriveSeed(1, 1, 0));
  EXPECT_NE(DeriveSeed(1, 0, 0), DeriveSeed(1, 0, 1));
  EXPECT_EQ(DeriveSeed(1, 2, 3), DeriveSeed(1, 2, 3));
}

}  // namespace
}  // namespace robust_cp
