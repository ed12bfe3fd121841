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

// Smoothed scores of synthetic-task classifiers and best-effort attacks on
// them.
//
// Attacks optimize a Monte-Carlo estimate of the smoothed true-label
// probability with common random numbers: one fixed set of noise draws is
// reused for every candidate, so candidate comparisons are not swamped by
// sampling noise.

#ifndef ROBUST_CP_HARNESS_ATTACKS_H_
#define ROBUST_CP_HARNESS_ATTACKS_H_

#include <span>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "robust_cp/harness/synthetic_task.h"
#include "robust_cp/random/philox.h"
#include "robust_cp/smoothing/noise.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

enum class ScoreKind { kTps, kAps };

std::string ScoreKindName(ScoreKind kind);
absl::StatusOr<ScoreKind> ParseScoreKind(std::string_view name);

// Unsmoothed scores of every class at x. `u` is the APS tie-break.
std::vector<double> BaseScores(const SyntheticTask& task,
                               std::span<const double> x, ScoreKind kind,
                               double u);

// One distribution per class from `num_samples` shared noise draws; the APS
// tie-break is drawn once per noise draw.
absl::StatusOr<std::vector<ScoreDistribution>> SmoothClassDistributions(
    const SyntheticTask& task, const SmoothingScheme& scheme,
    std::span<const double> x, ScoreKind kind, int64_t num_samples,
    const BinGrid& grid, RngStream& rng);

enum class AttackGoal { kLowerTrueScore, kRaiseTrueScore };

struct AttackOptions {
  int samples = 128;
  int steps = 20;
};

struct AttackResult {
  std::vector<double> x;
  double clean_objective = 0.0;  // CRN estimate at the clean input
  double objective = 0.0;        // CRN estimate at the returned input
  double l2_distance = 0.0;
  int additions = 0;
  int deletions = 0;
};

// Projected normalized-gradient steps inside the L2 ball of `radius`.
AttackResult AttackL2(const SyntheticTask& task, std::span<const double> x,
                      int label, double sigma, double radius, AttackGoal goal,
                      const AttackOptions& options, RngStream& rng);

// Greedy single-bit flips with at most `r_a` 0->1 and `r_d` 1->0 changes.
AttackResult AttackBinary(const SyntheticTask& task, std::span<const double> x,
                          int label, const SparseFlipNoise& noise, int r_a,
                          int r_d, AttackGoal goal,
                          const AttackOptions& options, RngStream& rng);

}  // namespace robust_cp

#endif  // ROBUST_CP_HARNESS_ATTACKS_H_
