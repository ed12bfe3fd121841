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

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace robust_cp {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

absl::Status CheckBudget(double alpha, double eta) {
  if (absl::Status s = ValidateAlpha(alpha); !s.ok()) return s;
  if (!(eta > 0.0 && eta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta=", eta, " outside (0, 1)"));
  }
  if (!(alpha > eta)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "corrected sets need alpha > eta, got alpha=", alpha, " eta=", eta));
  }
  return absl::OkStatus();
}

}  // namespace

absl::Status ValidateEvasionConfig(const EvasionConfig& config) {
  if (absl::Status s = CheckCompatible(config.scheme, config.model); !s.ok()) {
    return s;
  }
  if (config.eta.has_value() && !(*config.eta > 0.0 && *config.eta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta=", *config.eta, " outside (0, 1)"));
  }
  return absl::OkStatus();
}

std::vector<double> CalibrationTable::SmoothMeans() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const CalibrationRow& row : rows) out.push_back(row.smooth_mean);
  return out;
}

std::vector<double> CalibrationTable::Lowers() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const CalibrationRow& row : rows) out.push_back(row.lower);
  return out;
}

std::vector<double> CalibrationTable::CorrectedLowers() const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const CalibrationRow& row : rows) out.push_back(row.corrected_lower);
  return out;
}

absl::StatusOr<CalibrationResult> CalibrateSmooth(
    std::span<const ScoreDistribution> true_label_dists, double alpha,
    const EvasionConfig& config) {
  if (true_label_dists.empty()) {
    return absl::InvalidArgumentError("calibration set is empty");
  }
  if (absl::Status s = ValidateAlpha(alpha); !s.ok()) return s;
  if (absl::Status s = ValidateEvasionConfig(config); !s.ok()) return s;
  // Calibration inputs are clean, so their lower bounds cover every point of
  // the ball around them without the observed-input swap.
  absl::StatusOr<Certifier> certifier =
      Certifier::Create(config.scheme, config.model, InputView::kClean);
  if (!certifier.ok()) return certifier.status();

  const size_t n = true_label_dists.size();
  CalibrationResult result;
  result.table.bound_kind = config.bound_kind;
  result.table.rows.reserve(n);
  for (const ScoreDistribution& dist : true_label_dists) {
    if (absl::Status s = ValidateDistribution(dist); !s.ok()) return s;
    CalibrationRow row;
    row.dist = dist;
    row.smooth_mean = dist.mean;
    row.lower = certifier->Bound(dist, config.bound_kind, BoundDirection::kLower);
    row.corrected_lower = kNaN;
    if (config.eta.has_value()) {
      absl::StatusOr<CorrectedDistribution> corrected = CorrectDistribution(
          dist, *config.eta / (2.0 * n), FlavorFor(config.bound_kind));
      if (!corrected.ok()) return corrected.status();
      row.corrected_lower = CorrectedBound(*corrected, *certifier,
                                           config.bound_kind,
                                           BoundDirection::kLower);
    }
    result.table.rows.push_back(std::move(row));
  }
  absl::StatusOr<double> q =
      ConformalQuantile(result.table.SmoothMeans(), alpha);
  if (!q.ok()) return q.status();
  result.q_alpha = *q;
  return result;
}

PredictionSet TestTimeSet(std::span<const ScoreDistribution> class_dists,
                          double q_alpha, const Certifier& observed,
                          BoundKind kind) {
  std::vector<double> upper(class_dists.size());
  for (size_t y = 0; y < class_dists.size(); ++y) {
    upper[y] = observed.Bound(class_dists[y], kind, BoundDirection::kUpper);
  }
  return MakePredictionSet(upper, q_alpha);
}

absl::StatusOr<PredictionSet> TestTimeSet(
    std::span<const ScoreDistribution> class_dists, double q_alpha,
    const EvasionConfig& config) {
  if (absl::Status s = ValidateEvasionConfig(config); !s.ok()) return s;
  absl::StatusOr<Certifier> observed =
      Certifier::Create(config.scheme, config.model, InputView::kObserved);
  if (!observed.ok()) return observed.status();
  for (const ScoreDistribution& dist : class_dists) {
    if (absl::Status s = ValidateDistribution(dist); !s.ok()) return s;
  }
  return TestTimeSet(class_dists, q_alpha, *observed, config.bound_kind);
}

absl::StatusOr<double> CalibrationTimeThreshold(const CalibrationTable& table,
                                                double alpha) {
  return ConformalQuantile(table.Lowers(), alpha);
}

PredictionSet SmoothMeanSet(std::span<const ScoreDistribution> class_dists,
                            double threshold) {
  std::vector<double> means(class_dists.size());
  for (size_t y = 0; y < class_dists.size(); ++y) {
    means[y] = class_dists[y].mean;
  }
  return MakePredictionSet(means, threshold);
}

absl::StatusOr<double> VanillaWorstCaseCoverage(std::span<const double> lowers,
                                                double q_alpha) {
  absl::StatusOr<double> beta = InverseQuantile(q_alpha, lowers);
  if (!beta.ok()) return beta.status();
  return 1.0 - *beta;
}

absl::StatusOr<CorrectedCalibration> CorrectedCalibrate(
    const CalibrationTable& table, double alpha, double eta) {
  if (absl::Status s = CheckBudget(alpha, eta); !s.ok()) return s;
  if (table.rows.empty()) {
    return absl::InvalidArgumentError("calibration set is empty");
  }
  const std::vector<double> lowers = table.CorrectedLowers();
  for (double v : lowers) {
    if (std::isnan(v)) {
      return absl::FailedPreconditionError(
          "calibration table was built without correction");
    }
  }
  CorrectedCalibration out;
  out.alpha = alpha;
  out.eta = eta;
  out.ledger = BudgetLedger(eta);
  const int64_t n = static_cast<int64_t>(table.rows.size());
  if (absl::Status s =
          out.ledger.Charge("calibration lower bounds", eta / (2.0 * n), n);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<double> q = ConformalQuantile(lowers, alpha - eta);
  if (!q.ok()) return q.status();
  out.threshold = *q;
  return out;
}

absl::StatusOr<PredictionSet> CorrectedSet(
    std::span<const ScoreDistribution> class_dists,
    const CorrectedCalibration& calibration, BudgetLedger* ledger) {
  const int64_t num_classes = static_cast<int64_t>(class_dists.size());
  if (num_classes == 0) {
    return absl::InvalidArgumentError("test point has no classes");
  }
  const double eta_class = calibration.eta / (2.0 * num_classes);
  BudgetLedger local = calibration.ledger;
  if (absl::Status s =
          local.Charge("test smooth means", eta_class, num_classes);
      !s.ok()) {
    return s;
  }
  std::vector<double> corrected(num_classes);
  for (int64_t y = 0; y < num_classes; ++y) {
    const ScoreDistribution& dist = class_dists[y];
    absl::StatusOr<double> radius =
        BernsteinRadius(dist.sample_count, dist.variance, eta_class);
    if (!radius.ok()) return radius.status();
    corrected[y] = std::min(dist.mean + *radius, 1.0);
  }
  if (ledger != nullptr) *ledger = std::move(local);
  return MakePredictionSet(corrected, calibration.threshold);
}

absl::StatusOr<TestTimeCorrection> TestTimeCorrectedCalibrate(
    std::span<const double> smooth_means, double alpha, double eta) {
  if (absl::Status s = CheckBudget(alpha, eta); !s.ok()) return s;
  TestTimeCorrection out;
  out.eta_1 = eta / 2.0;
  out.eta_2 = eta / 2.0;
  out.calibration_alpha = alpha - out.eta_1 - out.eta_2;
  absl::StatusOr<double> q =
      ConformalQuantile(smooth_means, out.calibration_alpha);
  if (!q.ok()) return q.status();
  out.q_mc = *q;
  return out;
}

absl::StatusOr<PredictionSet> TestTimeCorrectedSet(
    std::span<const ScoreDistribution> class_dists,
    const TestTimeCorrection& calibration, const Certifier& observed,
    BoundKind kind) {
  std::vector<double> scores(class_dists.size());
  for (size_t y = 0; y < class_dists.size(); ++y) {
    const ScoreDistribution& dist = class_dists[y];
    absl::StatusOr<CorrectedDistribution> corrected =
        CorrectDistribution(dist, calibration.eta_2, FlavorFor(kind));
    if (!corrected.ok()) return corrected.status();
    absl::StatusOr<double> hoeffding =
        HoeffdingRadius(dist.sample_count, calibration.eta_1);
    if (!hoeffding.ok()) return hoeffding.status();
    scores[y] = CorrectedBound(*corrected, observed, kind,
                               BoundDirection::kUpper) +
                *hoeffding;
  }
  return MakePredictionSet(scores, calibration.q_mc);
}

}  // namespace robust_cp
