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

#include "robust_cp/core/score_functions.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace robust_cp {

absl::Status ValidateProbabilities(std::span<const double> probs) {
  if (probs.empty()) {
    return absl::InvalidArgumentError("probability vector is empty");
  }
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("probability ", p, " outside [0, 1]"));
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kProbSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrCat("probabilities sum to ", total, ", expected 1"));
  }
  return absl::OkStatus();
}

absl::StatusOr<ProbVector> ProbVector::Create(std::vector<double> probs) {
  if (absl::Status s = ValidateProbabilities(probs); !s.ok()) return s;
  return ProbVector(std::move(probs));
}

absl::StatusOr<double> TpsScore(const ProbVector& probs, int label) {
  if (label < 0 || label >= probs.num_classes()) {
    return absl::OutOfRangeError(absl::StrCat(
        "label ", label, " out of range for ", probs.num_classes(),
        " classes"));
  }
  return internal::TpsScoreUnchecked(probs.values(), label);
}

absl::StatusOr<double> ApsScore(const ProbVector& probs, int label, double u) {
  if (label < 0 || label >= probs.num_classes()) {
    return absl::OutOfRangeError(absl::StrCat(
        "label ", label, " out of range for ", probs.num_classes(),
        " classes"));
  }
  if (!(u >= 0.0 && u <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("tie-break u=", u, " outside [0, 1]"));
  }
  return internal::ApsScoreUnchecked(probs.values(), label, u);
}

namespace internal {

double TpsScoreUnchecked(std::span<const double> probs, int label) {
  return probs[label];
}

double ApsScoreUnchecked(std::span<const double> probs, int label, double u) {
  const double own = probs[label];
  double above = 0.0;
  for (double p : probs) {
    if (p > own) above += p;
  }
  return std::clamp(1.0 - above - u * own, 0.0, 1.0);
}

}  // namespace internal
}  // namespace robust_cp
