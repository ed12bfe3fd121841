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

#include "robust_cp/correction/confidence.h"

#include <cmath>
#include <limits>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robust_cp/random/philox.h"
#include "tests/oracles.h"

namespace robust_cp {
namespace {

TEST(RadiusTest, HoeffdingExample) {
  EXPECT_NEAR(*HoeffdingRadius(10000, 0.05), std::sqrt(std::log(40.0) / 2e4),
              1e-15);
  EXPECT_NEAR(*HoeffdingRadius(10000, 0.05), 0.013581, 1e-6);
  EXPECT_EQ(*DkwRadius(10000, 0.05), *HoeffdingRadius(10000, 0.05));
  EXPECT_FALSE(HoeffdingRadius(100, 2.0).ok());
  EXPECT_FALSE(HoeffdingRadius(100, 0.0).ok());
  EXPECT_FALSE(HoeffdingRadius(0, 0.1).ok());
}

TEST(RadiusTest, HoeffdingShrinksWithSamples) {
  double previous = std::numeric_limits<double>::infinity();
  for (int64_t m = 1; m <= 1 << 20; m *= 2) {
    const double r = *HoeffdingRadius(m, 0.05);
    EXPECT_LT(r, previous);
    previous = r;
  }
  EXPECT_LT(previous, 2e-3);
}

TEST(RadiusTest, BernsteinExample) {
  EXPECT_NEAR(*BernsteinRadius(10000, 0.25, 0.05), 0.015825, 1e-6);
  EXPECT_NEAR(*BernsteinRadius(10000, 0.0, 0.05),
              7.0 * std::log(80.0) / (3.0 * 9999.0), 1e-15);
  EXPECT_FALSE(BernsteinRadius(1, 0.1, 0.05).ok());
}

TEST(RadiusTest, BernsteinTighterForSmallVariance) {
  for (int64_t m : {1000, 10000, 100000}) {
    for (double eta : {0.001, 0.01, 0.05}) {
      for (double var = 0.0; var <= 0.1; var += 0.01) {
        EXPECT_LT(*BernsteinRadius(m, var, eta), *HoeffdingRadius(m, eta))
            << m << " " << eta << " " << var;
      }
    }
  }
}

ScoreDistribution TwoBin(double p2) {
  return *DistributionFromCdf(10000, 0.5, 0.1, *BinGrid::Create({0, 0.5, 1}),
                              {0.0, p2, 1.0});
}

TEST(CorrectDistributionTest, BandsClipAndStayMonotone) {
  const CorrectedDistribution c =
      CorrectDistributionWithRadii(TwoBin(0.5), 0.0, 0.0136);
  EXPECT_NEAR(c.cdf_lo[1], 0.4864, 1e-15);
  EXPECT_NEAR(c.cdf_hi[1], 0.5136, 1e-15);
  const CorrectedDistribution high =
      CorrectDistributionWithRadii(TwoBin(0.999), 0.0, 0.0136);
  EXPECT_EQ(high.cdf_hi[1], 1.0);
  const CorrectedDistribution zero =
      CorrectDistributionWithRadii(TwoBin(0.3), 0.0, 0.0);
  EXPECT_EQ(zero.cdf_lo, zero.base.cdf);
  EXPECT_EQ(zero.cdf_hi, zero.base.cdf);
  EXPECT_EQ(zero.mean_lo, 0.5);
  EXPECT_EQ(zero.mean_hi, 0.5);

  Philox4x64 rng(1, 0, 0);
  std::vector<double> samples(30);
  for (double& s : samples) s = rng.Uniform();
  const CorrectedDistribution c2 = CorrectDistributionWithRadii(
      *SummarizeSamples(samples, BinGrid::Uniform(11)), 0.3, 0.3);
  for (size_t j = 0; j < c2.cdf_lo.size(); ++j) {
    EXPECT_LE(c2.cdf_lo[j], c2.base.cdf[j]);
    EXPECT_GE(c2.cdf_hi[j], c2.base.cdf[j]);
    if (j > 0) {
      EXPECT_GE(c2.cdf_lo[j], c2.cdf_lo[j - 1]);
      EXPECT_GE(c2.cdf_hi[j], c2.cdf_hi[j - 1]);
    }
  }
  EXPECT_LE(c2.mean_lo, c2.base.mean);
  EXPECT_GE(c2.mean_hi, c2.base.mean);
}

TEST(CorrectDistributionTest, FlavorsPickRadii) {
  const ScoreDistribution dist = TwoBin(0.5);
  const CorrectedDistribution mean =
      *CorrectDistribution(dist, 0.05, CorrectionFlavor::kMeanBernstein);
  EXPECT_EQ(mean.cdf_radius, 0.0);
  EXPECT_EQ(mean.mean_radius, *BernsteinRadius(10000, 0.1, 0.05));
  const CorrectedDistribution cdf =
      *CorrectDistribution(dist, 0.05, CorrectionFlavor::kCdfDkw);
  EXPECT_EQ(cdf.mean_radius, 0.0);
  EXPECT_EQ(cdf.cdf_radius, *DkwRadius(10000, 0.05));
  const CorrectedDistribution both =
      *CorrectDistribution(dist, 0.05, CorrectionFlavor::kBoth);
  EXPECT_EQ(both.mean_radius, *BernsteinRadius(10000, 0.1, 0.025));
  EXPECT_EQ(both.cdf_radius, *DkwRadius(10000, 0.025));
}

TEST(CorrectedBoundTest, GaussianCdfLowerExample) {
  const Certifier certifier =
      *Certifier::Create(GaussianNoise{0.5}, L2Ball{0.5}, InputView::kObserved);
  const CorrectedDistribution c =
      CorrectDistributionWithRadii(TwoBin(0.5), 0.0, 0.1);
  const double expected =
      0.5 - testing::ShiftOracle(0.6, 1.0) * 0.5;  // uses p_2 = 0.6
  EXPECT_NEAR(CorrectedBound(c, certifier, BoundKind::kCdf,
                             BoundDirection::kLower),
              expected, 1e-9);
  // Phi(1.253347) = 0.894960, so the bound is 0.052520.
  EXPECT_NEAR(expected, 0.052520, 1e-6);
}

TEST(CorrectedBoundTest, ZeroRadiiReproduceUncorrected) {
  const Certifier certifier = *Certifier::Create(
      SparseFlipNoise{0.01, 0.6}, BinaryBall{1, 2}, InputView::kObserved);
  Philox4x64 rng(2, 0, 0);
  std::vector<double> samples(100);
  for (double& s : samples) s = rng.Uniform();
  const ScoreDistribution dist = *SummarizeSamples(samples, BinGrid::Uniform());
  const CorrectedDistribution c = CorrectDistributionWithRadii(dist, 0.0, 0.0);
  for (BoundKind kind : {BoundKind::kMean, BoundKind::kCdf}) {
    for (BoundDirection dir : {BoundDirection::kUpper, BoundDirection::kLower}) {
      EXPECT_EQ(CorrectedBound(c, certifier, kind, dir),
                certifier.Bound(dist, kind, dir));
    }
  }
}

TEST(CorrectedBoundTest, ConservativeNesting) {
  Philox4x64 rng(3, 0, 0);
  const std::vector<Certifier> certifiers = {
      *Certifier::Create(GaussianNoise{0.25}, L2Ball{0.125},
                         InputView::kObserved),
      *Certifier::Create(SparseFlipNoise{0.01, 0.6}, BinaryBall{2, 2},
                         InputView::kObserved)};
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> samples(200);
    const double skew = 0.2 + 4.0 * rng.Uniform();
    for (double& s : samples) s = std::pow(rng.Uniform(), skew);
    const ScoreDistribution dist =
        *SummarizeSamples(samples, BinGrid::Uniform());
    const CorrectedDistribution c =
        *CorrectDistribution(dist, 0.01, CorrectionFlavor::kBoth);
    for (const Certifier& certifier : certifiers) {
      for (BoundKind kind : {BoundKind::kMean, BoundKind::kCdf}) {
        EXPECT_GE(CorrectedBound(c, certifier, kind, BoundDirection::kUpper),
                  certifier.Bound(dist, kind, BoundDirection::kUpper));
        EXPECT_LE(CorrectedBound(c, certifier, kind, BoundDirection::kLower),
                  certifier.Bound(dist, kind, BoundDirection::kLower));
      }
    }
  }
}

TEST(CorrectedBoundTest, OneShotRejectsMismatch) {
  EXPECT_EQ(CorrectedBoundForObserved(TwoBin(0.5), BinaryBall{1, 1},
                                      GaussianNoise{0.25},
                                      BoundDirection::kUpper, BoundKind::kCdf,
                                      0.01)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_TRUE(CorrectedBoundForObserved(TwoBin(0.5), L2Ball{0.1},
                                        GaussianNoise{0.25},
                                        BoundDirection::kUpper,
                                        BoundKind::kCdf, 0.01)
                  .ok());
}

TEST(BudgetLedgerTest, TracksAndRejectsOverspend) {
  BudgetLedger ledger(0.01);
  ASSERT_TRUE(ledger.Charge("calibration", 0.01 / 200, 100).ok());
  ASSERT_TRUE(ledger.Charge("test", 0.01 / 20, 10).ok());
  EXPECT_NEAR(ledger.consumed(), 0.01, 1e-15);
  EXPECT_LE(ledger.consumed(), ledger.eta() * (1 + 1e-12));
  EXPECT_EQ(ledger.entries().size(), 2u);
  EXPECT_EQ(ledger.Charge("extra", 1e-4).code(), absl::StatusCode::kInternal);
  EXPECT_NEAR(ledger.consumed(), 0.01, 1e-15);
}

// Empirical violation rates of each interval stay below their eta.
TEST(IntervalCoverageTest, ViolationRatesWithinBudget) {
  const int trials = 2000;
  const int m = 200;
  const double eta = 0.1;
  Philox4x64 rng(4, 0, 0);
  const BinGrid grid = BinGrid::Uniform(11);
  // Scores s = u^2 with u uniform: mean 1/3, variance 4/45, CDF sqrt(b).
  const double mu = 1.0 / 3.0;
  int hoeffding_miss = 0, bernstein_miss = 0, dkw_miss = 0;
  std::vector<double> samples(m);
  for (int t = 0; t < trials; ++t) {
    for (double& s : samples) {
      const double u = rng.Uniform();
      s = u * u;
    }
    const ScoreDistribution dist = *SummarizeSamples(samples, grid);
    hoeffding_miss += std::abs(dist.mean - mu) > *HoeffdingRadius(m, eta);
    bernstein_miss +=
        std::abs(dist.mean - mu) > *BernsteinRadius(m, dist.variance, eta);
    const double dkw = *DkwRadius(m, eta);
    bool miss = false;
    for (int j = 0; j < grid.size(); ++j) {
      miss |= std::abs(dist.cdf[j] - std::sqrt(grid.edge(j))) > dkw;
    }
    dkw_miss += miss;
  }
  const double slack = 3.0 * std::sqrt(eta * (1 - eta) / trials);
  EXPECT_LE(hoeffding_miss / double(trials), eta + slack);
  EXPECT_LE(bernstein_miss / double(trials), eta + slack);
  EXPECT_LE(dkw_miss / double(trials), eta + slack);
}

}  // namespace
}  // namespace robust_cp
