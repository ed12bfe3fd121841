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

#include "robust_cp/evasion/evasion.h"

#include <cmath>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robust_cp/random/philox.h"

namespace robust_cp {
namespace {

using ::testing::ElementsAre;

ScoreDistribution Constant(double value, int64_t m = 1000) {
  std::vector<double> samples(m, value);
  return *SummarizeSamples(samples, BinGrid::Uniform());
}

ScoreDistribution Random(Philox4x64& rng, int m = 400) {
  std::vector<double> samples(m);
  const double center = rng.Uniform();
  const double spread = 0.05 + 0.3 * rng.Uniform();
  for (double& s : samples) {
    s = std::clamp(center + spread * (rng.Uniform() - 0.5), 0.0, 1.0);
  }
  return *SummarizeSamples(samples, BinGrid::Uniform());
}

EvasionConfig Config(double r, BoundKind kind) {
  EvasionConfig config;
  config.scheme = GaussianNoise{0.25};
  config.model = L2Ball{r};
  config.bound_kind = kind;
  return config;
}

TEST(CalibrateSmoothTest, ConstantScores) {
  std::vector<ScoreDistribution> cal(20, Constant(0.4));
  for (double alpha : {0.1, 0.3, 0.9}) {
    const CalibrationResult result =
        *CalibrateSmooth(cal, alpha, Config(0.1, BoundKind::kCdf));
    EXPECT_DOUBLE_EQ(result.q_alpha, 0.4);
  }
}

TEST(CalibrateSmoothTest, OrderStatisticOfMeans) {
  std::vector<ScoreDistribution> cal = {Constant(0.3), Constant(0.1),
                                        Constant(0.2)};
  const CalibrationResult result =
      *CalibrateSmooth(cal, 0.5, Config(0.0, BoundKind::kMean));
  EXPECT_DOUBLE_EQ(result.q_alpha, 0.2);
  EXPECT_THAT(result.table.SmoothMeans(), ElementsAre(0.3, 0.1, 0.2));
  EXPECT_TRUE(std::isnan(result.table.rows[0].corrected_lower));
}

TEST(CalibrateSmoothTest, Errors) {
  EXPECT_FALSE(CalibrateSmooth({}, 0.1, Config(0.1, BoundKind::kCdf)).ok());
  std::vector<ScoreDistribution> cal = {Constant(0.3)};
  EvasionConfig bad = Config(0.1, BoundKind::kCdf);
  bad.model = BinaryBall{1, 1};
  EXPECT_EQ(CalibrateSmooth(cal, 0.1, bad).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(TestTimeSetTest, ZeroRadiusMatchesVanilla) {
  Philox4x64 rng(1, 0, 0);
  for (int t = 0; t < 50; ++t) {
    std::vector<ScoreDistribution> classes;
    for (int y = 0; y < 5; ++y) classes.push_back(Random(rng));
    const double q = rng.Uniform();
    EXPECT_EQ(
        TestTimeSet(classes, q, Config(0.0, BoundKind::kMean))->members,
        SmoothMeanSet(classes, q).members);
  }
}

TEST(TestTimeSetTest, VanillaNestedInConservative) {
  Philox4x64 rng(2, 0, 0);
  for (int t = 0; t < 100; ++t) {
    std::vector<ScoreDistribution> classes;
    for (int y = 0; y < 6; ++y) classes.push_back(Random(rng));
    const double q = rng.Uniform();
    const PredictionSet vanilla = SmoothMeanSet(classes, q);
    for (BoundKind kind : {BoundKind::kMean, BoundKind::kCdf}) {
      const PredictionSet robust =
          *TestTimeSet(classes, q, Config(0.125, kind));
      for (int y : vanilla.members) EXPECT_TRUE(robust.Contains(y));
    }
  }
}

TEST(CalibrationTimeTest, ThresholdBelowVanilla) {
  Philox4x64 rng(3, 0, 0);
  std::vector<ScoreDistribution> cal;
  for (int i = 0; i < 60; ++i) cal.push_back(Random(rng));
  const CalibrationResult zero =
      *CalibrateSmooth(cal, 0.1, Config(0.0, BoundKind::kMean));
  EXPECT_EQ(*CalibrationTimeThreshold(zero.table, 0.1), zero.q_alpha);
  for (BoundKind kind : {BoundKind::kMean, BoundKind::kCdf}) {
    for (double r : {0.05, 0.125, 0.25}) {
      const CalibrationResult result =
          *CalibrateSmooth(cal, 0.1, Config(r, kind));
      EXPECT_LE(*CalibrationTimeThreshold(result.table, 0.1), result.q_alpha);
    }
  }
}

TEST(VanillaWorstCaseCoverageTest, Boundaries) {
  Philox4x64 rng(4, 0, 0);
  std::vector<double> scores(99);
  for (double& s : scores) s = rng.Uniform();
  const double q = *ConformalQuantile(scores, 0.1);
  // Lower bounds equal to the scores: beta is the grid point of alpha.
  EXPECT_NEAR(*VanillaWorstCaseCoverage(scores, q), 0.9, 1e-12);
  const std::vector<double> zeros(99, 0.0);
  EXPECT_DOUBLE_EQ(*VanillaWorstCaseCoverage(zeros, q), 0.0);
}

TEST(VanillaWorstCaseCoverageTest, TighterLowerBoundsCertifyMore) {
  Philox4x64 rng(5, 0, 0);
  std::vector<double> loose(50), tight(50);
  for (int i = 0; i < 50; ++i) {
    tight[i] = rng.Uniform();
    loose[i] = tight[i] * rng.Uniform();
  }
  for (double q : {0.05, 0.2, 0.5}) {
    EXPECT_GE(*VanillaWorstCaseCoverage(tight, q),
              *VanillaWorstCaseCoverage(loose, q));
  }
}

TEST(CorrectedSetsTest, BudgetSplitAndDominance) {
  Philox4x64 rng(6, 0, 0);
  std::vector<ScoreDistribution> cal;
  for (int i = 0; i < 80; ++i) cal.push_back(Random(rng, 2000));
  EvasionConfig config = Config(0.125, BoundKind::kCdf);
  config.eta = 0.01;
  const CalibrationResult result = *CalibrateSmooth(cal, 0.1, config);
  for (const CalibrationRow& row : result.table.rows) {
    EXPECT_LE(row.corrected_lower, row.lower);
  }
  const CorrectedCalibration corrected =
      *CorrectedCalibrate(result.table, 0.1, 0.01);
  EXPECT_NEAR(corrected.ledger.consumed(), 0.005, 1e-15);
  EXPECT_LE(corrected.threshold,
            *ConformalQuantile(result.table.Lowers(), 0.1 - 0.005));

  std::vector<ScoreDistribution> test;
  for (int y = 0; y < 4; ++y) test.push_back(Random(rng, 2000));
  BudgetLedger ledger(0.0);
  const PredictionSet set = *CorrectedSet(test, corrected, &ledger);
  EXPECT_NEAR(ledger.consumed(), 0.01, 1e-15);
  EXPECT_LE(ledger.consumed(), 0.01 * (1 + 1e-12));
  // The corrected set contains every class whose plain mean clears the
  // corrected threshold.
  for (int y : SmoothMeanSet(test, corrected.threshold).members) {
    EXPECT_TRUE(set.Contains(y));
  }
}

TEST(CorrectedSetsTest, AlphaMustExceedEta) {
  std::vector<ScoreDistribution> cal(10, Constant(0.5));
  EvasionConfig config = Config(0.1, BoundKind::kCdf);
  config.eta = 0.2;
  const CalibrationResult result = *CalibrateSmooth(cal, 0.1, config);
  EXPECT_EQ(CorrectedCalibrate(result.table, 0.1, 0.2).status().code(),
            absl::StatusCode::kFailedPrecondition);
  EXPECT_EQ(TestTimeCorrectedCalibrate(result.table.SmoothMeans(), 0.1, 0.1)
                .status()
                .code(),
            absl::StatusCode::kFailedPrecondition);
  const CalibrationResult uncorrected =
      *CalibrateSmooth(cal, 0.1, Config(0.1, BoundKind::kCdf));
  EXPECT_EQ(CorrectedCalibrate(uncorrected.table, 0.3, 0.01).status().code(),
            absl::StatusCode::kFailedPrecondition);
}

TEST(TestTimeCorrectionTest, CalibratesAtReducedAlpha) {
  Philox4x64 rng(7, 0, 0);
  std::vector<double> means(200);
  for (double& m : means) m = rng.Uniform();
  const TestTimeCorrection c = *TestTimeCorrectedCalibrate(means, 0.1, 0.02);
  EXPECT_DOUBLE_EQ(c.calibration_alpha, 0.08);
  EXPECT_EQ(c.q_mc, *ConformalQuantile(means, 0.08));
  std::vector<ScoreDistribution> test;
  for (int y = 0; y < 3; ++y) test.push_back(Random(rng, 1000));
  const Certifier observed = *Certifier::Create(
      GaussianNoise{0.25}, L2Ball{0.125}, InputView::kObserved);
  const PredictionSet set =
      *TestTimeCorrectedSet(test, c, observed, BoundKind::kMean);
  for (int y : TestTimeSet(test, c.q_mc, observed, BoundKind::kMean).members) {
    EXPECT_TRUE(set.Contains(y));
  }
}

}  // namespace
}  // namespace robust_cp
