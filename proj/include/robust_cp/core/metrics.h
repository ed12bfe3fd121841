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

#ifndef ROBUST_CP_CORE_METRICS_H_
#define ROBUST_CP_CORE_METRICS_H_

#include <cstdint>
#include <span>
#include <vector>

#include "absl/status/statusor.h"
#include "robust_cp/core/conformal.h"

namespace robust_cp {

struct MetricsReport {
  int64_t num_points = 0;
  double empirical_coverage = 0.0;
  double avg_set_size = 0.0;
  // Fraction of points whose set is exactly {true label}.
  double singleton_hit_ratio = 0.0;
  // set_size_histogram[s] = number of sets of size s, s = 0..num_classes.
  std::vector<int64_t> set_size_histogram;
};

// An empty input yields an all-zero report.
absl::StatusOr<MetricsReport> Evaluate(std::span<const PredictionSet> sets,
                                       std::span<const int> labels,
                                       int num_classes);

}  // namespace robust_cp

#endif  // ROBUST_CP_CORE_METRICS_H_
