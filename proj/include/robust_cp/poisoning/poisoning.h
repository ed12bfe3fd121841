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

// Conformal thresholds under calibration-set poisoning.
//
// An adversary changes at most k calibration points. For feature poisoning a
// changed point i may take any score in [lower_i, upper_i]; for label
// poisoning it may take any entry of its score row. The conservative
// threshold is the smallest conformal quantile reachable this way (the
// certifier's view); the attack threshold is the largest (the attacker's
// view). Both are found exactly by a rank search over candidate values.

#ifndef ROBUST_CP_POISONING_POISONING_H_
#define ROBUST_CP_POISONING_POISONING_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "robust_cp/bounds/threat_model.h"
#include "robust_cp/core/conformal.h"
#include "robust_cp/correction/confidence.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

struct FeaturePoisonInstance {
  std::vector<double> scores;  // observed true-label scores s_i
  std::vector<double> lower;   // lower_i <= s_i
  std::vector<double> upper;   // upper_i >= s_i
  int k = 0;
  double alpha = 0.1;
};

struct LabelPoisonInstance {
  std::vector<std::vector<double>> score_matrix;  // [point][class]
  std::vector<int> labels;
  int k = 0;
  double alpha = 0.1;
};

struct PoisonChange {
  int point = 0;
  double value = 0.0;  // score the point takes after the change
  int label = -1;      // new label (label poisoning only)
};

struct ConservativeThreshold {
  double q = kAcceptAll;
  int64_t order_index = 0;
  std::vector<PoisonChange> witness;  // ascending point index
};

enum class PoisonObjective { kMinimize, kMaximize };

absl::Status ValidateInstance(const FeaturePoisonInstance& inst);
absl::Status ValidateInstance(const LabelPoisonInstance& inst);

// Smallest reachable quantile (certificate).
absl::StatusOr<ConservativeThreshold> FeaturePoisonThreshold(
    const FeaturePoisonInstance& inst);
absl::StatusOr<ConservativeThreshold> LabelPoisonThreshold(
    const LabelPoisonInstance& inst);

// Either direction. kMaximize pushes points to `upper` / the row maximum.
absl::StatusOr<ConservativeThreshold> SolveFeaturePoison(
    const FeaturePoisonInstance& inst, PoisonObjective objective);
absl::StatusOr<ConservativeThreshold> SolveLabelPoison(
    const LabelPoisonInstance& inst, PoisonObjective objective);

// Exhaustive enumeration of every change set. Refuses n > 10 or more than 4
// classes.
absl::StatusOr<double> BruteForceFeaturePoison(
    const FeaturePoisonInstance& inst, PoisonObjective objective);
absl::StatusOr<double> BruteForceLabelPoison(const LabelPoisonInstance& inst,
                                             PoisonObjective objective);

// Applies the witness and recomputes the quantile; returns it.
absl::StatusOr<double> ReplayFeatureWitness(const FeaturePoisonInstance& inst,
                                            const ConservativeThreshold& t);
absl::StatusOr<double> ReplayLabelWitness(const LabelPoisonInstance& inst,
                                          const ConservativeThreshold& t);

// Monte-Carlo corrected feature-poisoning threshold. Each point's lower value
// is its corrected CDF lower bound minus a Hoeffding term
//   eps = sqrt(ln(2 / eta) / (2 D)),
// where D defaults to the calibration-set size; the search runs at
// alpha_prime - eta. Lower values are clamped to the MC scores.
struct CorrectedPoisonResult {
  ConservativeThreshold threshold;
  double epsilon = 0.0;
  double alpha = 0.0;
  BudgetLedger ledger{0.0};
};

absl::StatusOr<CorrectedPoisonResult> CorrectedFeaturePoisonThreshold(
    std::span<const double> mc_scores, std::span<const double> corrected_lower,
    int k, double alpha_prime, double eta,
    std::optional<int64_t> hoeffding_denominator = std::nullopt);

// Robust to both attacks: evasion upper bounds at the observed test input
// compared with a poisoning-conservative threshold.
PredictionSet CombinedRobustSet(std::span<const ScoreDistribution> class_dists,
                                double q_poison, const Certifier& observed,
                                BoundKind kind);

}  // namespace robust_cp

#endif  // ROBUST_CP_POISONING_POISONING_H_
