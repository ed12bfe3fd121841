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

#include <algorithm>
#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robust_cp/random/philox.h"
#include "robust_cp/smoothing/noise.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {
namespace {

using ::testing::ElementsAre;

TEST(SampleGaussianTest, TinySigmaKeepsInput) {
  Philox4x64 rng(1, 0, 0);
  const std::vector<double> x = {0.5, -1.0, 3.0};
  const std::vector<double> y = SampleGaussian(x, 1e-300, rng);
  for (size_t i = 0; i < x.size(); ++i) EXPECT_DOUBLE_EQ(y[i], x[i]);
}

TEST(SampleGaussianTest, Moments) {
  const int n = 100000;
  Philox4x64 rng(2, 0, 0);
  const std::vector<double> zero = {0.0};
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += SampleGaussian(zero, 1.0, rng)[0];
  EXPECT_NEAR(sum / n, 0.0, 0.01);

  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = SampleGaussian(zero, 0.25, rng)[0];
    sq += v * v;
  }
  EXPECT_NEAR(sq / n, 0.0625, 0.003);
}

TEST(SampleSparseTest, NoFlipsKeepsInput) {
  Philox4x64 rng(3, 0, 0);
  const std::vector<double> x = {0, 1, 1, 0, 1};
  EXPECT_EQ(*SampleSparse(x, 0.0, 0.0, rng), x);
}

TEST(SampleSparseTest, FlipFractions) {
  Philox4x64 rng(4, 0, 0);
  const std::vector<double> ones(100000, 1.0);
  const std::vector<double> out = *SampleSparse(ones, 0.01, 0.6, rng);
  double kept = 0.0;
  for (double v : out) kept += v;
  EXPECT_NEAR(kept / ones.size(), 0.4, 0.01);

  const std::vector<double> zeros(100000, 0.0);
  const std::vector<double> flipped = *SampleSparse(zeros, 0.01, 0.6, rng);
  double added = 0.0;
  for (double v : flipped) added += v;
  EXPECT_NEAR(added / zeros.size(), 0.01, 0.002);
}

TEST(SampleSparseTest, RejectsNonBinaryInput) {
  Philox4x64 rng(5, 0, 0);
  const std::vector<double> x = {0, 0.5};
  EXPECT_EQ(SampleSparse(x, 0.1, 0.1, rng).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ValidateSchemeTest, Ranges) {
  EXPECT_TRUE(ValidateScheme(GaussianNoise{0.25}).ok());
  EXPECT_FALSE(ValidateScheme(GaussianNoise{0.0}).ok());
  EXPECT_FALSE(ValidateScheme(GaussianNoise{-1.0}).ok());
  EXPECT_TRUE(ValidateScheme(SparseFlipNoise{0.0, 0.0}).ok());
  EXPECT_FALSE(ValidateScheme(SparseFlipNoise{1.0, 0.2}).ok());
  EXPECT_FALSE(ValidateScheme(SparseFlipNoise{0.2, -0.1}).ok());
}

TEST(BinGridTest, Validation) {
  EXPECT_TRUE(BinGrid::Create({0.0, 0.5, 1.0}).ok());
  EXPECT_TRUE(BinGrid::Create({0.0, 0.3, 0.3, 1.0}).ok());
  EXPECT_FALSE(BinGrid::Create({0.0, 1.0}).ok());
  EXPECT_FALSE(BinGrid::Create({0.1, 0.5, 1.0}).ok());
  EXPECT_FALSE(BinGrid::Create({0.0, 0.6, 0.5, 1.0}).ok());
  EXPECT_FALSE(BinGrid::Create({0.0, 0.0, 0.5, 1.0}).ok());
  EXPECT_FALSE(BinGrid::Create({0.0, 0.5, 1.0, 1.0}).ok());
  const BinGrid uniform = BinGrid::Uniform();
  EXPECT_EQ(uniform.size(), 51);
  EXPECT_DOUBLE_EQ(uniform.edge(25), 0.5);
  EXPECT_DOUBLE_EQ(uniform.edge(50), 1.0);
}

TEST(SummarizeSamplesTest, CdfCountsAtOrBelowEachEdge) {
  const BinGrid grid = *BinGrid::Create({0.0, 0.25, 0.5, 0.75, 1.0});
  const std::vector<double> samples = {0.0, 0.25, 0.3, 0.5, 0.9};
  const ScoreDistribution dist = *SummarizeSamples(samples, grid);
  EXPECT_THAT(dist.cdf, ElementsAre(0.2, 0.4, 0.8, 0.8, 1.0));
  EXPECT_NEAR(dist.mean, 0.39, 1e-15);
  double sq = 0.0;
  for (double s : samples) sq += (s - 0.39) * (s - 0.39);
  EXPECT_NEAR(dist.variance, sq / 4.0, 1e-15);
  EXPECT_TRUE(ValidateDistribution(dist).ok());
}

TEST(SummarizeSamplesTest, RejectsOutOfRangeScore) {
  const std::vector<double> samples = {0.2, 1.5};
  EXPECT_EQ(SummarizeSamples(samples, BinGrid::Uniform()).status().code(),
            absl::StatusCode::kInternal);
}

TEST(EstimateDistributionTest, ConstantOracle) {
  Philox4x64 rng(6, 0, 0);
  const std::vector<double> x = {0.0, 0.0};
  const ScoreOracle oracle = [](std::span<const double>, double) {
    return 0.5;
  };
  const ScoreDistribution dist = *EstimateDistribution(
      oracle, x, GaussianNoise{0.25}, 1000, BinGrid::Uniform(), rng);
  EXPECT_EQ(dist.sample_count, 1000);
  EXPECT_DOUBLE_EQ(dist.mean, 0.5);
  EXPECT_DOUBLE_EQ(dist.variance, 0.0);
  for (int j = 0; j < dist.grid.size(); ++j) {
    EXPECT_DOUBLE_EQ(dist.cdf[j], dist.grid.edge(j) >= 0.5 ? 1.0 : 0.0);
  }
}

TEST(EstimateDistributionTest, HalfSpaceIndicator) {
  Philox4x64 rng(7, 0, 0);
  const std::vector<double> x = {0.3, -0.2};
  const ScoreOracle oracle = [](std::span<const double> v, double) {
    return v[0] + v[1] >= 0.1 ? 1.0 : 0.0;
  };
  const int m = 10000;
  const ScoreDistribution dist = *EstimateDistribution(
      oracle, x, GaussianNoise{0.5}, m, BinGrid::Uniform(), rng);
  EXPECT_NEAR(dist.mean, 0.5, 3.0 / std::sqrt(m));
}

TEST(EstimateDistributionTest, ErrorsAndContracts) {
  Philox4x64 rng(8, 0, 0);
  const std::vector<double> x = {0.0};
  const ScoreOracle bad = [](std::span<const double>, double) { return 1.2; };
  EXPECT_EQ(EstimateDistribution(bad, x, GaussianNoise{1.0}, 10,
                                 BinGrid::Uniform(), rng)
                .status()
                .code(),
            absl::StatusCode::kInternal);
  const ScoreOracle ok = [](std::span<const double>, double) { return 0.1; };
  EXPECT_FALSE(EstimateDistribution(ok, x, GaussianNoise{1.0}, 1,
                                    BinGrid::Uniform(), rng)
                   .ok());
  const std::vector<double> non_binary = {0.5};
  EXPECT_FALSE(EstimateDistribution(ok, non_binary, SparseFlipNoise{0.1, 0.1},
                                    10, BinGrid::Uniform(), rng)
                   .ok());
}

ScoreDistribution EstimateForPoint(const std::vector<double>& x, int point) {
  Philox4x64 rng(99, static_cast<uint64_t>(point), 0);
  const ScoreOracle oracle = [](std::span<const double> v, double u) {
    const double z = 1.0 / (1.0 + std::exp(-v[0] - 2.0 * v[1]));
    return std::clamp(z - 0.05 * u, 0.0, 1.0);
  };
  return *EstimateDistribution(oracle, x, GaussianNoise{0.4}, 500,
                               BinGrid::Uniform(21), rng);
}

TEST(EstimateDistributionTest, DeterministicAndOrderIndependent) {
  const std::vector<std::vector<double>> points = {
      {0.1, 0.2}, {-1.0, 0.5}, {0.0, 0.0}, {2.0, -1.0}};
  std::vector<ScoreDistribution> forward;
  for (int i = 0; i < 4; ++i) forward.push_back(EstimateForPoint(points[i], i));
  // Process in reverse order with the same per-point substreams.
  for (int i = 3; i >= 0; --i) {
    const ScoreDistribution again = EstimateForPoint(points[i], i);
    EXPECT_EQ(again.mean, forward[i].mean);
    EXPECT_EQ(again.variance, forward[i].variance);
    EXPECT_EQ(again.cdf, forward[i].cdf);
  }
}

TEST(ScoreDistributionTest, BinnedBoundsSandwichMean) {
  Philox4x64 rng(10, 0, 0);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> samples(50);
    const double skew = 0.2 + 3.0 * rng.Uniform();
    for (double& s : samples) s = std::pow(rng.Uniform(), skew);
    const ScoreDistribution dist =
        *SummarizeSamples(samples, BinGrid::Uniform(3 + trial % 30));
    EXPECT_LE(dist.BinnedMeanLower(), dist.mean + 1e-12);
    EXPECT_GE(dist.BinnedMeanUpper(), dist.mean - 1e-12);
  }
}

}  // namespace
}  // namespace robust_cp
