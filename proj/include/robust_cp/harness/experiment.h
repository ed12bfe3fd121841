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

// Experiment runner on synthetic tasks.
//
// A pool of points is drawn once from the task; smoothed score distributions,
// attacked inputs and certified bounds are computed per pool point. Each trial
// then draws a calibration set and a test set without replacement from the
// pool (exchangeable sampling) and evaluates every method on that split.
//
// Methods (column `method` of the outputs):
//   vanilla           smooth means against the quantile of smooth means
//   rscp              test-time mean-bound upper bounds against that quantile
//   cas               smooth means against the quantile of CDF lower bounds
//   cas_test_time     test-time CDF upper bounds against the vanilla quantile
//   cas_corrected     Monte-Carlo corrected calibration-time sets (eta > 0)
//   label_vanilla     base scores, calibration labels flipped by the attack
//   label_robust      label-poisoning conservative threshold
//   feature_vanilla   smooth means, calibration features poisoned
//   feature_robust    feature-poisoning conservative threshold
//   feature_corrected Monte-Carlo corrected feature-poisoning threshold
//   combined          poisoning threshold with test-time CDF upper bounds on
//                     attacked test inputs

#ifndef ROBUST_CP_HARNESS_EXPERIMENT_H_
#define ROBUST_CP_HARNESS_EXPERIMENT_H_

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "robust_cp/core/metrics.h"
#include "robust_cp/harness/attacks.h"
#include "robust_cp/harness/synthetic_task.h"
#include "robust_cp/io/config.h"
#include "robust_cp/smoothing/noise.h"

namespace robust_cp {

struct BinaryRadius {
  int r_a = 0;
  int r_d = 0;
};

struct ExperimentConfig {
  TaskSpec task;
  uint64_t seed = 0;
  int trials = 100;
  int pool_size = 1000;
  int calibration_size = 100;
  int test_size = 200;
  double alpha = 0.1;
  ScoreKind score = ScoreKind::kTps;
  double sigma = 0.25;     // gaussian-mixture smoothing
  SparseFlipNoise sparse;  // binary-linear smoothing
  // Evasion radii: multiples of sigma (gaussian-mixture) or (r_a, r_d).
  std::vector<double> radii = {0.5};
  std::vector<BinaryRadius> binary_radii = {{2, 2}};
  int samples = 1000;
  int bins = 51;
  AttackOptions attack;
  double eta = 0.0;  // > 0 enables the corrected methods
  std::vector<double> size_alphas;
  std::vector<int> label_poison_k;
  std::vector<int> feature_poison_k;
  double feature_poison_radius = 0.5;  // multiples of sigma
  BinaryRadius feature_poison_binary = {1, 1};
  int workers = 1;
};

absl::Status ValidateExperimentConfig(const ExperimentConfig& config);

// Reads the keys listed in docs/formats.md; unknown keys are rejected.
absl::StatusOr<ExperimentConfig> ExperimentConfigFromKeyValue(
    const KeyValueConfig& kv);
// Every field, defaults included.
KeyValueConfig ExperimentConfigToKeyValue(const ExperimentConfig& config);

struct MethodResult {
  std::string method;
  std::string setting;  // "r=0.5", "ra=2,rd=2", "k=1", ...
  std::string input;    // "clean" or "attacked"
  double alpha = 0.0;
  double radius = 0.0;  // multiple of sigma, or r_a + r_d
  int k = -1;           // poisoning budget, -1 if not applicable
  MetricsReport metrics;
  double threshold = 0.0;
};

struct TrialResult {
  int trial = 0;
  uint64_t seed = 0;
  bool ok = true;
  std::string error;
  std::vector<MethodResult> methods;
  // Named per-trial quantities, e.g. "beta_cas@r=0.5".
  std::map<std::string, double> scalars;
  std::vector<std::string> invariant_violations;
};

struct AggregateRow {
  std::string method, setting, input;
  double alpha = 0.0;
  double radius = 0.0;
  int k = -1;
  int trials = 0;
  double coverage_mean = 0.0, coverage_std = 0.0;
  double size_mean = 0.0, size_std = 0.0;
  double singleton_hit_mean = 0.0;
  double threshold_mean = 0.0;
};

struct ScalarRow {
  std::string name;
  int trials = 0;
  double mean = 0.0, std = 0.0, min = 0.0, max = 0.0;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;
  std::vector<AggregateRow> aggregate;
  std::vector<ScalarRow> scalars;
  // Pool-level and trial-level assertion failures.
  std::vector<std::string> invariant_violations;

  const AggregateRow* Find(std::string_view method, std::string_view setting,
                           std::string_view input, double alpha) const;
};

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config);

// Writes trials.jsonl, aggregate.csv, aggregate_scalars.csv and plotdata/
// under `dir`, each file atomically.
absl::Status WriteExperimentOutputs(const ExperimentResult& result,
                                    const std::string& dir);

// Runs `fn(i)` for i in [0, n) on `workers` threads.
void ParallelFor(int n, int workers, const std::function<void(int)>& fn);

}  // namespace robust_cp

#endif  // ROBUST_CP_HARNESS_EXPERIMENT_H_
