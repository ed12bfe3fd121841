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

// Split conformal calibration with conformity scores (larger = more
// conforming). The threshold for miscoverage level alpha over n calibration
// scores is the k-th smallest score with k = floor(alpha * (n + 1)). When
// k = 0 the threshold is kAcceptAll and every label is accepted.

#ifndef ROBUST_CP_CORE_CONFORMAL_H_
#define ROBUST_CP_CORE_CONFORMAL_H_

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace robust_cp {

// Threshold sentinel that accepts every label.
inline constexpr double kAcceptAll = -std::numeric_limits<double>::infinity();

class QuantileSpec {
 public:
  static absl::StatusOr<QuantileSpec> Create(double alpha);

  double alpha() const { return alpha_; }

  // floor(alpha * (n + 1)). A 1e-9 slack absorbs representation error so
  // that e.g. alpha = 0.29, n = 99 gives 29 rather than 28.
  int64_t OrderIndex(int64_t n) const;

 private:
  explicit QuantileSpec(double alpha) : alpha_(alpha) {}

  double alpha_;
};

absl::Status ValidateAlpha(double alpha);

// Shared helper: floor(alpha * (n + 1)) with the same slack as QuantileSpec.
int64_t ConformalOrderIndex(double alpha, int64_t n);

absl::StatusOr<double> ConformalQuantile(std::span<const double> scores,
                                         const QuantileSpec& spec);
absl::StatusOr<double> ConformalQuantile(std::span<const double> scores,
                                         double alpha);

// k-th smallest element (1-based); k = 0 yields kAcceptAll.
double KthSmallest(std::span<const double> scores, int64_t k);

// min { tau on the grid k/(n+1), k = 0..n+1 : quantile(scores, tau) >= t }.
// Returns 0 for t = kAcceptAll and 1 when no k <= n qualifies.
absl::StatusOr<double> InverseQuantile(double t,
                                       std::span<const double> scores);

struct PredictionSet {
  std::vector<int> members;  // ascending class indices
  double threshold = kAcceptAll;

  bool Contains(int label) const;
  int size() const { return static_cast<int>(members.size()); }
};

// {y : class_scores[y] >= threshold}.
PredictionSet MakePredictionSet(std::span<const double> class_scores,
                                double threshold);

// Coverage of split CP over the draw of the calibration set is
// Beta(n + 1 - l, l) with l = floor((n + 1) alpha). For l = 0 the coverage is
// identically one and `degenerate` is set.
struct CoverageBeta {
  double a = 0.0;
  double b = 0.0;
  bool degenerate = false;

  double Mean() const { return degenerate ? 1.0 : a / (a + b); }
};

absl::StatusOr<CoverageBeta> CoverageDistribution(int64_t n, double alpha);

}  // namespace robust_cp

#endif  // ROBUST_CP_CORE_CONFORMAL_H_
