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

// Versioned JSON calibration artifact written by `robust_cp calibrate` and
// read by `robust_cp predict`.

#ifndef ROBUST_CP_IO_ARTIFACT_H_
#define ROBUST_CP_IO_ARTIFACT_H_

#include <optional>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "robust_cp/evasion/evasion.h"

namespace robust_cp {

inline constexpr int kArtifactVersion = 1;

struct CalibrationArtifact {
  EvasionConfig evasion;
  double alpha = 0.1;
  double q_alpha = kAcceptAll;      // quantile of the smooth means
  double q_calibration = kAcceptAll;  // quantile of the certified lowers
  // Present when evasion.eta is set.
  std::optional<double> q_corrected;
  CalibrationTable table;
};

// Recomputes every threshold from the table; fails if the table is empty.
absl::StatusOr<CalibrationArtifact> BuildCalibrationArtifact(
    std::span<const ScoreDistribution> true_label_dists, double alpha,
    const EvasionConfig& config);

// Two-space indented JSON with a trailing newline. Doubles use the shortest
// representation that parses back to the same value; -inf and NaN are null.
std::string SerializeCalibrationArtifact(const CalibrationArtifact& artifact);
absl::StatusOr<CalibrationArtifact> ParseCalibrationArtifact(
    std::string_view json);

}  // namespace robust_cp

#endif  // ROBUST_CP_IO_ARTIFACT_H_
