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

#include <cmath>
#include <filesystem>
#include <numeric>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robust_cp/harness/attacks.h"
#include "robust_cp/harness/experiment.h"
#include "robust_cp/harness/synthetic_task.h"
#include "robust_cp/io/files.h"
#include "robust_cp/random/philox.h"

namespace robust_cp {
namespace {

using ::testing::DoubleNear;
using ::testing::Each;
using ::testing::IsEmpty;

TaskSpec GaussianSpec() {
  TaskSpec spec;
  spec.kind = TaskKind::kGaussianMixture;
  spec.seed = 3;
  return spec;
}

TaskSpec BinarySpec() {
  TaskSpec spec;
  spec.kind = TaskKind::kBinaryLinear;
  spec.dims = 32;
  spec.informative_bits = 6;
  spec.seed = 3;
  return spec;
}

TEST(SyntheticTaskTest, SamplesAreDeterministic) {
  absl::StatusOr<SyntheticTask> a = SyntheticTask::Create(GaussianSpec());
  absl::StatusOr<SyntheticTask> b = SyntheticTask::Create(GaussianSpec());
  ASSERT_TRUE(a.ok() && b.ok());
  for (int i = 0; i < 20; ++i) {
    EXPECT_EQ(a->Sample(i).x, b->Sample(i).x);
    EXPECT_EQ(a->Sample(i).label, b->Sample(i).label);
  }
  EXPECT_NE(a->Sample(0).x, a->Sample(1).x);
}

TEST(SyntheticTaskTest, ProbabilitiesFormSimplex) {
  for (const TaskSpec& spec : {GaussianSpec(), BinarySpec()}) {
    absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(spec);
    ASSERT_TRUE(task.ok());
    for (int i = 0; i < 50; ++i) {
      std::vector<double> p(task->num_classes());
      task->Probabilities(task->Sample(i).x, p);
      ASSERT_EQ(p.size(), static_cast<size_t>(task->num_classes()));
      EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
      EXPECT_THAT(p, Each(::testing::Ge(0.0)));
    }
  }
}

TEST(SyntheticTaskTest, BinaryFeaturesAreBits) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(BinarySpec());
  ASSERT_TRUE(task.ok());
  for (int i = 0; i < 20; ++i) {
    for (double v : task->Sample(i).x) EXPECT_TRUE(v == 0.0 || v == 1.0);
  }
}

TEST(SyntheticTaskTest, BayesClassifierBeatsChance) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(GaussianSpec());
  ASSERT_TRUE(task.ok());
  int correct = 0;
  for (int i = 0; i < 400; ++i) {
    const LabeledPoint point = task->Sample(i);
    std::vector<double> p(task->num_classes());
    task->Probabilities(point.x, p);
    correct += std::max_element(p.begin(), p.end()) - p.begin() == point.label;
  }
  EXPECT_GT(correct, 400 / task->num_classes() + 50);
}

TEST(SyntheticTaskTest, RejectsBadSpecs) {
  TaskSpec spec = GaussianSpec();
  spec.num_classes = 1;
  EXPECT_FALSE(SyntheticTask::Create(spec).ok());
  spec = GaussianSpec();
  spec.dims = 0;
  EXPECT_FALSE(SyntheticTask::Create(spec).ok());
  EXPECT_FALSE(ParseTaskKind("mnist").ok());
  EXPECT_EQ(*ParseTaskKind(TaskKindName(TaskKind::kBinaryLinear)),
            TaskKind::kBinaryLinear);
}

TEST(AttackTest, L2AttackStaysInBallAndLowersScore) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(GaussianSpec());
  ASSERT_TRUE(task.ok());
  AttackOptions options;
  options.samples = 32;
  for (int i = 0; i < 10; ++i) {
    const LabeledPoint point = task->Sample(i);
    Philox4x64 rng(1, 2, i);
    const AttackResult attack =
        AttackL2(*task, point.x, point.label, 0.25, 0.2,
                 AttackGoal::kLowerTrueScore, options, rng);
    EXPECT_LE(attack.l2_distance, 0.2 * (1 + 1e-9));
    double distance = 0.0;
    for (size_t d = 0; d < point.x.size(); ++d) {
      distance += (attack.x[d] - point.x[d]) * (attack.x[d] - point.x[d]);
    }
    EXPECT_NEAR(std::sqrt(distance), attack.l2_distance, 1e-9);
    EXPECT_LE(attack.objective, attack.clean_objective);
  }
}

TEST(AttackTest, ZeroRadiusReturnsInput) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(GaussianSpec());
  ASSERT_TRUE(task.ok());
  const LabeledPoint point = task->Sample(0);
  Philox4x64 rng(1, 2, 3);
  const AttackResult attack =
      AttackL2(*task, point.x, point.label, 0.25, 0.0,
               AttackGoal::kLowerTrueScore, AttackOptions{}, rng);
  EXPECT_EQ(attack.x, point.x);
  EXPECT_EQ(attack.l2_distance, 0.0);
}

TEST(AttackTest, BinaryAttackRespectsFlipBudget) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(BinarySpec());
  ASSERT_TRUE(task.ok());
  AttackOptions options;
  options.samples = 32;
  for (int r_a = 0; r_a <= 2; ++r_a) {
    for (int r_d = 0; r_d <= 2; ++r_d) {
      const LabeledPoint point = task->Sample(r_a * 3 + r_d);
      Philox4x64 rng(5, r_a, r_d);
      for (AttackGoal goal :
           {AttackGoal::kLowerTrueScore, AttackGoal::kRaiseTrueScore}) {
        const AttackResult attack =
            AttackBinary(*task, point.x, point.label, SparseFlipNoise{}, r_a,
                         r_d, goal, options, rng);
        int additions = 0, deletions = 0;
        for (size_t d = 0; d < point.x.size(); ++d) {
          additions += point.x[d] == 0.0 && attack.x[d] == 1.0;
          deletions += point.x[d] == 1.0 && attack.x[d] == 0.0;
        }
        EXPECT_EQ(additions, attack.additions);
        EXPECT_EQ(deletions, attack.deletions);
        EXPECT_LE(additions, r_a);
        EXPECT_LE(deletions, r_d);
        if (goal == AttackGoal::kLowerTrueScore) {
          EXPECT_LE(attack.objective, attack.clean_objective);
        } else {
          EXPECT_GE(attack.objective, attack.clean_objective);
        }
      }
    }
  }
}

TEST(SmoothTest, DistributionsShareDrawsAndAreDeterministic) {
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(GaussianSpec());
  const BinGrid grid = BinGrid::Uniform(11);
  ASSERT_TRUE(task.ok());
  const LabeledPoint point = task->Sample(4);
  Philox4x64 rng_a(9, 9, 9), rng_b(9, 9, 9);
  absl::StatusOr<std::vector<ScoreDistribution>> a = SmoothClassDistributions(
      *task, GaussianNoise{0.25}, point.x, ScoreKind::kTps, 500, grid, rng_a);
  absl::StatusOr<std::vector<ScoreDistribution>> b = SmoothClassDistributions(
      *task, GaussianNoise{0.25}, point.x, ScoreKind::kTps, 500, grid, rng_b);
  ASSERT_TRUE(a.ok() && b.ok());
  double total = 0.0;
  for (size_t c = 0; c < a->size(); ++c) {
    EXPECT_EQ((*a)[c].mean, (*b)[c].mean);
    total += (*a)[c].mean;
  }
  // TPS scores are probabilities, so class means sum to one per shared draw.
  EXPECT_NEAR(total, 1.0, 1e-12);
}

ExperimentConfig SmallConfig() {
  ExperimentConfig config;
  config.task = GaussianSpec();
  config.seed = 3;
  config.trials = 6;
  config.pool_size = 120;
  config.calibration_size = 40;
  config.test_size = 60;
  config.samples = 200;
  config.bins = 21;
  config.attack.samples = 16;
  config.attack.steps = 5;
  config.radii = {0.0, 0.5};
  config.eta = 0.05;
  config.size_alphas = {0.2};
  config.label_poison_k = {0, 2};
  config.feature_poison_k = {0, 2};
  return config;
}

TEST(ExperimentTest, RunsCleanlyAndReportsEveryMethod) {
  absl::StatusOr<ExperimentResult> result = RunExperiment(SmallConfig());
  ASSERT_TRUE(result.ok()) << result.status();
  EXPECT_THAT(result->invariant_violations, IsEmpty());
  for (const TrialResult& trial : result->trials) EXPECT_TRUE(trial.ok);
  for (const char* method :
       {"vanilla", "rscp", "cas", "cas_test_time", "cas_corrected"}) {
    EXPECT_NE(result->Find(method, "r=0.5", "attacked", 0.1), nullptr)
        << method;
  }
  EXPECT_NE(result->Find("cas", "r=0", "clean", 0.2), nullptr);
  EXPECT_NE(result->Find("label_robust", "k=2", "clean", 0.1), nullptr);
  EXPECT_NE(result->Find("feature_corrected", "k=2", "clean", 0.1), nullptr);
  EXPECT_NE(result->Find("combined", "k=2;r=0", "attacked", 0.1), nullptr);
}

TEST(ExperimentTest, ZeroRadiusAndZeroBudgetReduceToVanilla) {
  absl::StatusOr<ExperimentResult> result = RunExperiment(SmallConfig());
  ASSERT_TRUE(result.ok()) << result.status();
  const AggregateRow* vanilla = result->Find("vanilla", "r=0", "clean", 0.1);
  ASSERT_NE(vanilla, nullptr);
  const AggregateRow* rscp = result->Find("rscp", "r=0", "attacked", 0.1);
  ASSERT_NE(rscp, nullptr);
  EXPECT_NEAR(rscp->coverage_mean, vanilla->coverage_mean, 1e-12);
  // At r = 0 the CDF variants reduce to the binned Anderson bound, which sits
  // below the mean, so they can only add classes.
  for (const char* method : {"cas", "cas_test_time"}) {
    const AggregateRow* row = result->Find(method, "r=0", "attacked", 0.1);
    ASSERT_NE(row, nullptr);
    EXPECT_GE(row->coverage_mean, vanilla->coverage_mean) << method;
    EXPECT_GE(row->size_mean, vanilla->size_mean) << method;
  }
  for (const char* method : {"label_vanilla", "label_robust"}) {
    const AggregateRow* row = result->Find(method, "k=0", "clean", 0.1);
    ASSERT_NE(row, nullptr);
    EXPECT_EQ(
        row->coverage_mean,
        result->Find("label_vanilla", "k=0", "clean", 0.1)->coverage_mean);
  }
  const AggregateRow* feature =
      result->Find("feature_robust", "k=0", "clean", 0.1);
  ASSERT_NE(feature, nullptr);
  EXPECT_EQ(feature->coverage_mean, vanilla->coverage_mean);
}

TEST(ExperimentTest, ScalarsRespectBudgets) {
  absl::StatusOr<ExperimentResult> result = RunExperiment(SmallConfig());
  ASSERT_TRUE(result.ok()) << result.status();
  for (const TrialResult& trial : result->trials) {
    EXPECT_LE(trial.scalars.at("ledger_consumed@r=0.5"), 0.05 + 1e-15);
    EXPECT_LE(trial.scalars.at("feature_ledger_consumed@k=2"), 0.05 + 1e-15);
    EXPECT_GE(trial.scalars.at("corrected_gap@r=0.5"), 0.0);
    EXPECT_GE(trial.scalars.at("beta_cas@r=0"), 0.0);
  }
}

TEST(ExperimentTest, IndependentOfWorkerCount) {
  ExperimentConfig config = SmallConfig();
  absl::StatusOr<ExperimentResult> serial = RunExperiment(config);
  config.workers = 3;
  absl::StatusOr<ExperimentResult> parallel = RunExperiment(config);
  ASSERT_TRUE(serial.ok() && parallel.ok());
  ASSERT_EQ(serial->aggregate.size(), parallel->aggregate.size());
  for (size_t i = 0; i < serial->aggregate.size(); ++i) {
    EXPECT_EQ(serial->aggregate[i].coverage_mean,
              parallel->aggregate[i].coverage_mean);
    EXPECT_EQ(serial->aggregate[i].threshold_mean,
              parallel->aggregate[i].threshold_mean);
  }
}

TEST(ExperimentTest, OutputsAreByteIdentical) {
  const std::filesystem::path root =
      std::filesystem::path(::testing::TempDir()) / "harness_test_outputs";
  std::filesystem::remove_all(root);
  for (const char* dir : {"a", "b"}) {
    absl::StatusOr<ExperimentResult> result = RunExperiment(SmallConfig());
    ASSERT_TRUE(result.ok());
    ASSERT_TRUE(WriteExperimentOutputs(*result, (root / dir).string()).ok());
  }
  for (const char* file :
       {"trials.jsonl", "aggregate.csv", "aggregate_scalars.csv",
        "plotdata/coverage_vs_r.csv", "plotdata/size_vs_r.csv",
        "plotdata/size_vs_alpha.csv"}) {
    absl::StatusOr<std::string> a = ReadFile((root / "a" / file).string());
    absl::StatusOr<std::string> b = ReadFile((root / "b" / file).string());
    ASSERT_TRUE(a.ok() && b.ok()) << file;
    EXPECT_FALSE(a->empty()) << file;
    EXPECT_EQ(*a, *b) << file;
  }
}

TEST(ExperimentTest, ValidationRejectsBadConfigs) {
  ExperimentConfig config = SmallConfig();
  config.pool_size = 50;
  EXPECT_EQ(RunExperiment(config).status().code(),
            absl::StatusCode::kInvalidArgument);
  config = SmallConfig();
  config.eta = 0.2;
  EXPECT_EQ(ValidateExperimentConfig(config).code(),
            absl::StatusCode::kFailedPrecondition);
  config = SmallConfig();
  config.label_poison_k = {41};
  EXPECT_FALSE(ValidateExperimentConfig(config).ok());
}

TEST(ExperimentConfigTest, KeyValueRoundTrip) {
  ExperimentConfig config = SmallConfig();
  config.task.kind = TaskKind::kBinaryLinear;
  config.task.dims = 32;
  config.binary_radii = {{1, 2}, {0, 3}};
  config.score = ScoreKind::kAps;
  const KeyValueConfig kv = ExperimentConfigToKeyValue(config);
  absl::StatusOr<ExperimentConfig> back = ExperimentConfigFromKeyValue(kv);
  ASSERT_TRUE(back.ok()) << back.status();
  EXPECT_EQ(ExperimentConfigToKeyValue(*back).Serialize(), kv.Serialize());
  EXPECT_EQ(back->binary_radii.size(), 2u);
  EXPECT_EQ(back->binary_radii[1].r_d, 3);
  EXPECT_EQ(back->score, ScoreKind::kAps);
  EXPECT_THAT(back->radii,
              ::testing::ElementsAre(DoubleNear(0.0, 0), DoubleNear(0.5, 0)));
}

TEST(ExperimentConfigTest, UnknownKeyRejected) {
  absl::StatusOr<KeyValueConfig> kv = KeyValueConfig::Parse("trails = 5\n");
  ASSERT_TRUE(kv.ok());
  EXPECT_EQ(ExperimentConfigFromKeyValue(*kv).status().code(),
            absl::StatusCode::kInvalidArgument);
}

TEST(ParallelForTest, VisitsEveryIndexOnce) {
  std::vector<int> hits(100, 0);
  ParallelFor(100, 4, [&](int i) { hits[i] += 1; });
  EXPECT_THAT(hits, Each(1));
}

}  // namespace
}  // namespace robust_cp
