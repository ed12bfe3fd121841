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

// Prediction sets that keep their coverage when test inputs are perturbed
// inside a threat model.
//
// Two placements of the certificate are supported:
//   test time:        calibrate on smooth means, include a class when its
//                     certified upper bound at the observed input reaches the
//                     threshold;
//   calibration time: lower-bound every calibration score, take the quantile
//                     of the lower bounds, and compare plain smooth means.

#ifndef ROBUST_CP_EVASION_EVASION_H_
#define ROBUST_CP_EVASION_EVASION_H_

#include <optional>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "robust_cp/bounds/threat_model.h"
#include "robust_cp/core/conformal.h"
#include "robust_cp/correction/confidence.h"
#include "robust_cp/smoothing/noise.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

enum class EvasionMode { kTestTime, kCalibrationTime };

struct EvasionConfig {
  SmoothingScheme scheme = GaussianNoise{};
  ThreatModel model = L2Ball{};
  EvasionMode mode = EvasionMode::kCalibrationTime;
  // kMean reproduces the mean-only certificate, kCdf the CDF-aware one.
  BoundKind bound_kind = BoundKind::kCdf;
  // Total Monte-Carlo failure budget; unset disables finite-sample correction.
  std::optional<double> eta;
};

absl::Status ValidateEvasionConfig(const EvasionConfig& config);

struct CalibrationRow {
  ScoreDistribution dist;  // true-label score distribution
  double smooth_mean = 0.0;
  // Certified lower bound of the clean smoothed score at any point of the
  // threat model around the calibration input.
  double lower = 0.0;
  // Same with the Monte-Carlo correction at eta / (2 n); NaN when disabled.
  double corrected_lower = 0.0;
};

struct CalibrationTable {
  std::vector<CalibrationRow> rows;
  BoundKind bound_kind = BoundKind::kCdf;

  std::vector<double> SmoothMeans() const;
  std::vector<double> Lowers() const;
  std::vector<double> CorrectedLowers() const;
};

struct CalibrationResult {
  CalibrationTable table;
  double q_alpha = kAcceptAll;  // quantile of the smooth means
};

// Builds the table from the true-label distributions of the calibration
// points, which are treated as clean inputs.
absl::StatusOr<CalibrationResult> CalibrateSmooth(
    std::span<const ScoreDistribution> true_label_dists, double alpha,
    const EvasionConfig& config);

// Test-time certificate: {y : upper bound at the observed input >= q_alpha}.
absl::StatusOr<PredictionSet> TestTimeSet(
    std::span<const ScoreDistribution> class_dists, double q_alpha,
    const EvasionConfig& config);

// Certifier variant for batch use (no per-call region table rebuild).
PredictionSet TestTimeSet(std::span<const ScoreDistribution> class_dists,
                          double q_alpha, const Certifier& observed,
                          BoundKind kind);

// Quantile of the certified calibration lower bounds.
absl::StatusOr<double> CalibrationTimeThreshold(const CalibrationTable& table,
                                                double alpha);

// {y : smooth mean >= threshold}.
PredictionSet SmoothMeanSet(std::span<const ScoreDistribution> class_dists,
                            double threshold);

// Worst-case coverage 1 - beta of vanilla sets built with `q_alpha`, where
// beta = InverseQuantile(q_alpha, lower bounds).
absl::StatusOr<double> VanillaWorstCaseCoverage(std::span<const double> lowers,
                                                double q_alpha);

// Monte-Carlo corrected calibration-time sets. The budget eta is split as
// eta / (2 n) per calibration point and eta / (2 |Y|) per test class; the
// threshold is the (alpha - eta)-quantile of corrected lower bounds.
struct CorrectedCalibration {
  double threshold = kAcceptAll;
  double alpha = 0.0;
  double eta = 0.0;
  BudgetLedger ledger{0.0};
};

absl::StatusOr<CorrectedCalibration> CorrectedCalibrate(
    const CalibrationTable& table, double alpha, double eta);

// Includes y when the Bernstein-corrected smooth mean reaches the corrected
// threshold. `ledger` (optional) receives the test-side charges.
absl::StatusOr<PredictionSet> CorrectedSet(
    std::span<const ScoreDistribution> class_dists,
    const CorrectedCalibration& calibration, BudgetLedger* ledger = nullptr);

// Test-time correction chain: the vanilla threshold at
// alpha - eta_1 - eta_2 (eta_1 = eta_2 = eta / 2) is compared with the
// corrected upper bound plus a Hoeffding term for the unseen clean MC score.
struct TestTimeCorrection {
  double q_mc = kAcceptAll;
  double calibration_alpha = 0.0;
  double eta_1 = 0.0;
  double eta_2 = 0.0;
};

absl::StatusOr<TestTimeCorrection> TestTimeCorrectedCalibrate(
    std::span<const double> smooth_means, double alpha, double eta);

absl::StatusOr<PredictionSet> TestTimeCorrectedSet(
    std::span<const ScoreDistribution> class_dists,
    const TestTimeCorrection& calibration, const Certifier& observed,
    BoundKind kind);

}  // namespace robust_cp

#endif  // ROBUST_CP_EVASION_EVASION_H_
