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

#ifndef ROBUST_CP_CORE_SCORE_FUNCTIONS_H_
#define ROBUST_CP_CORE_SCORE_FUNCTIONS_H_

#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace robust_cp {

// Tolerance on the total mass of a probability vector.
inline constexpr double kProbSumTolerance = 1e-6;

// Class probabilities of one input. Entries lie in [0, 1] and sum to one
// within kProbSumTolerance.
class ProbVector {
 public:
  static absl::StatusOr<ProbVector> Create(std::vector<double> probs);

  std::span<const double> values() const { return probs_; }
  int num_classes() const { return static_cast<int>(probs_.size()); }
  double operator[](int c) const { return probs_[c]; }

 private:
  explicit ProbVector(std::vector<double> probs) : probs_(std::move(probs)) {}

  std::vector<double> probs_;
};

absl::Status ValidateProbabilities(std::span<const double> probs);

// Threshold prediction sets: the probability of `label`.
absl::StatusOr<double> TpsScore(const ProbVector& probs, int label);

// Adaptive prediction sets, shifted into [0, 1]:
//   1 - sum_c p[c] * 1[p[c] > p[label]] - u * p[label].
// Larger is more conforming. `u` is the randomized tie-break in [0, 1].
absl::StatusOr<double> ApsScore(const ProbVector& probs, int label, double u);

namespace internal {

// Unchecked variants for hot loops where the caller owns validation.
double TpsScoreUnchecked(std::span<const double> probs, int label);
double ApsScoreUnchecked(std::span<const double> probs, int label, double u);

}  // namespace internal
}  // namespace robust_cp

#endif  // ROBUST_CP_CORE_SCORE_FUNCTIONS_H_
