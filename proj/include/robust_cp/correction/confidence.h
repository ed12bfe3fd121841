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

// Finite-sample confidence radii and Monte-Carlo corrected bounds.

#ifndef ROBUST_CP_CORRECTION_CONFIDENCE_H_
#define ROBUST_CP_CORRECTION_CONFIDENCE_H_

#include <cstdint>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "robust_cp/bounds/threat_model.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

// sqrt(ln(2 / eta) / (2 m)).
absl::StatusOr<double> HoeffdingRadius(int64_t m, double eta);

// sqrt(2 var ln(4 / eta) / m) + 7 ln(4 / eta) / (3 (m - 1)).
absl::StatusOr<double> BernsteinRadius(int64_t m, double variance, double eta);

// Simultaneous band for every point of an empirical CDF; same value as
// HoeffdingRadius.
absl::StatusOr<double> DkwRadius(int64_t m, double eta);

// Tracks how much of a failure budget eta has been spent.
class BudgetLedger {
 public:
  struct Entry {
    std::string label;
    double amount = 0.0;
    int64_t count = 1;
  };

  explicit BudgetLedger(double eta) : eta_(eta) {}

  // Records `count` charges of `amount` each. Fails with an internal error if
  // the total would exceed eta by more than rounding.
  absl::Status Charge(std::string label, double amount, int64_t count = 1);

  double eta() const { return eta_; }
  double consumed() const { return consumed_; }
  const std::vector<Entry>& entries() const { return entries_; }

 private:
  double eta_;
  double consumed_ = 0.0;
  std::vector<Entry> entries_;
};

enum class CorrectionFlavor { kMeanBernstein, kCdfDkw, kBoth };

// Confidence bands around a distribution's mean and CDF. The CDF bands are
// clipped to [0, 1] and kept nondecreasing.
struct CorrectedDistribution {
  ScoreDistribution base;
  double mean_lo = 0.0;
  double mean_hi = 1.0;
  std::vector<double> cdf_lo;
  std::vector<double> cdf_hi;
  double mean_radius = 0.0;
  double cdf_radius = 0.0;
};

// kBoth splits `eta_part` evenly between the mean and the CDF band; the other
// flavors leave the unused band at zero width.
absl::StatusOr<CorrectedDistribution> CorrectDistribution(
    const ScoreDistribution& dist, double eta_part, CorrectionFlavor flavor);

// Bands with explicit radii (zero radii reproduce the empirical values).
CorrectedDistribution CorrectDistributionWithRadii(
    const ScoreDistribution& dist, double mean_radius, double cdf_radius);

// The conservative certificate: upper bounds read the upper mean / lower CDF
// band, lower bounds the lower mean / upper CDF band.
double CorrectedBound(const CorrectedDistribution& corrected,
                      const Certifier& certifier, BoundKind kind,
                      BoundDirection direction);

// Mean kind pairs with Bernstein, CDF kind with DKW.
CorrectionFlavor FlavorFor(BoundKind kind);

// One-shot: corrects `dist` with `eta_part` and bounds it in the observed view.
absl::StatusOr<double> CorrectedBoundForObserved(const ScoreDistribution& dist,
                                                 const ThreatModel& model,
                                                 const SmoothingScheme& scheme,
                                                 BoundDirection direction,
                                                 BoundKind kind,
                                                 double eta_part);

}  // namespace robust_cp

#endif  // ROBUST_CP_CORRECTION_CONFIDENCE_H_
