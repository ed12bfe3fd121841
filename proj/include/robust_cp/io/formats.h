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

// Tabular file formats used by the command-line tool. Byte-level layouts are
// documented in docs/formats.md. Every text format starts with a
// `# robust_cp <kind> v<version>` line; an unknown kind or version is an
// InvalidArgument error.

#ifndef ROBUST_CP_IO_FORMATS_H_
#define ROBUST_CP_IO_FORMATS_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "robust_cp/core/conformal.h"
#include "robust_cp/poisoning/poisoning.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

inline constexpr int kFormatVersion = 1;

// Monte-Carlo scores s(x_i + noise_j, c), row-major over (point, class,
// sample). Stored as 32-bit floats in both encodings so that CSV and binary
// round-trip into each other exactly.
struct ScoreTensor {
  int64_t num_points = 0;
  int64_t num_classes = 0;
  int64_t num_samples = 0;
  std::vector<float> values;

  float at(int64_t point, int64_t cls, int64_t sample) const {
    return values[(point * num_classes + cls) * num_samples + sample];
  }
};

absl::StatusOr<ScoreTensor> ParseScoreCsv(std::string_view text);
std::string FormatScoreCsv(const ScoreTensor& tensor);
absl::StatusOr<ScoreTensor> ParseScoreBinary(std::string_view bytes);
std::string FormatScoreBinary(const ScoreTensor& tensor);
// Dispatches on the leading magic bytes.
absl::StatusOr<ScoreTensor> ParseScoreTensor(std::string_view contents);

// distributions[i][c] summarizes the samples of point i and class c.
absl::StatusOr<std::vector<std::vector<ScoreDistribution>>>
DistributionsFromTensor(const ScoreTensor& tensor, const BinGrid& grid);

// Dense labels: point ids 0..n-1, each exactly once.
absl::StatusOr<std::vector<int>> ParseLabelsCsv(std::string_view text);
std::string FormatLabelsCsv(std::span<const int> labels);

std::string FormatSetsCsv(std::span<const PredictionSet> sets);
// Thresholds are not part of the sets file; parsed sets carry kAcceptAll.
absl::StatusOr<std::vector<PredictionSet>> ParseSetsCsv(std::string_view text);

// Feature instance rows: point_id,score,lower,upper. Label instance rows:
// point_id,label,score_0,...,score_{K-1}. Budget and alpha come from the
// command configuration.
absl::StatusOr<FeaturePoisonInstance> ParseFeaturePoisonCsv(
    std::string_view text);
std::string FormatFeaturePoisonCsv(const FeaturePoisonInstance& instance);
absl::StatusOr<LabelPoisonInstance> ParseLabelPoisonCsv(std::string_view text);
std::string FormatLabelPoisonCsv(const LabelPoisonInstance& instance);

}  // namespace robust_cp

#endif  // ROBUST_CP_IO_FORMATS_H_
