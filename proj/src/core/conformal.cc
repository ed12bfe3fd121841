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

#include "robust_cp/core/conformal.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace robust_cp {

absl::Status ValidateAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("alpha=", alpha, " outside (0, 1)"));
  }
  return absl::OkStatus();
}

int64_t ConformalOrderIndex(double alpha, int64_t n) {
  return static_cast<int64_t>(
      std::floor(alpha * static_cast<double>(n + 1) + 1e-9));
}

absl::StatusOr<QuantileSpec> QuantileSpec::Create(double alpha) {
  if (absl::Status s = ValidateAlpha(alpha); !s.ok()) return s;
  return QuantileSpec(alpha);
}

int64_t QuantileSpec::OrderIndex(int64_t n) const {
  return ConformalOrderIndex(alpha_, n);
}

double KthSmallest(std::span<const double> scores, int64_t k) {
  if (k <= 0) return kAcceptAll;
  std::vector<double> copy(scores.begin(), scores.end());
  auto nth = copy.begin() + (k - 1);
  std::nth_element(copy.begin(), nth, copy.end());
  return *nth;
}

absl::StatusOr<double> ConformalQuantile(std::span<const double> scores,
                                         const QuantileSpec& spec) {
  if (scores.empty()) {
    return absl::InvalidArgumentError("conformal quantile of empty scores");
  }
  const int64_t n = static_cast<int64_t>(scores.size());
  return KthSmallest(scores, std::min(spec.OrderIndex(n), n));
}

absl::StatusOr<double> ConformalQuantile(std::span<const double> scores,
                                         double alpha) {
  absl::StatusOr<QuantileSpec> spec = QuantileSpec::Create(alpha);
  if (!spec.ok()) return spec.status();
  return ConformalQuantile(scores, *spec);
}

absl::StatusOr<double> InverseQuantile(double t,
                                       std::span<const double> scores) {
  if (scores.empty()) {
    return absl::InvalidArgumentError("inverse quantile of empty scores");
  }
  if (t == kAcceptAll) return 0.0;
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
  if (it == sorted.end()) return 1.0;
  const double k = static_cast<double>(it - sorted.begin()) + 1.0;
  return k / static_cast<double>(sorted.size() + 1);
}

bool PredictionSet::Contains(int label) const {
  return std::binary_search(members.begin(), members.end(), label);
}

PredictionSet MakePredictionSet(std::span<const double> class_scores,
                                double threshold) {
  PredictionSet set;
  set.threshold = threshold;
  for (int y = 0; y < static_cast<int>(class_scores.size()); ++y) {
    if (class_scores[y] >= threshold) set.members.push_back(y);
  }
  return set;
}

absl::StatusOr<CoverageBeta> CoverageDistribution(int64_t n, double alpha) {
  if (n < 1) {
    return absl::InvalidArgumentError("calibration size must be at least 1");
  }
  if (absl::Status s = ValidateAlpha(alpha); !s.ok()) return s;
  const int64_t l = ConformalOrderIndex(alpha, n);
  CoverageBeta beta;
  if (l == 0) {
    beta.degenerate = true;
    return beta;
  }
  beta.a = static_cast<double>(n + 1 - l);
  beta.b = static_cast<double>(l);
  return beta;
}

}  // namespace robust_cp
