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

#include "robust_cp/core/metrics.h"

#include "absl/strings/str_cat.h"

namespace robust_cp {

absl::StatusOr<MetricsReport> Evaluate(std::span<const PredictionSet> sets,
                                       std::span<const int> labels,
                                       int num_classes) {
  if (sets.size() != labels.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("got ", sets.size(), " sets but ", labels.size(),
                     " labels"));
  }
  if (num_classes < 1) {
    return absl::InvalidArgumentError("num_classes must be positive");
  }
  MetricsReport report;
  report.num_points = static_cast<int64_t>(sets.size());
  report.set_size_histogram.assign(num_classes + 1, 0);
  if (sets.empty()) return report;

  int64_t covered = 0;
  int64_t singleton_hits = 0;
  int64_t total_size = 0;
  for (size_t i = 0; i < sets.size(); ++i) {
    const PredictionSet& set = sets[i];
    if (set.size() > num_classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("set ", i, " has more members than classes"));
    }
    const bool hit = set.Contains(labels[i]);
    covered += hit;
    singleton_hits += hit && set.size() == 1;
    total_size += set.size();
    ++report.set_size_histogram[set.size()];
  }
  const double n = static_cast<double>(sets.size());
  report.empirical_coverage = static_cast<double>(covered) / n;
  report.avg_set_size = static_cast<double>(total_size) / n;
  report.singleton_hit_ratio = static_cast<double>(singleton_hits) / n;
  return report;
}

}  // namespace robust_cp
