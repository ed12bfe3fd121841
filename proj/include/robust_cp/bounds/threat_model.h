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

#ifndef ROBUST_CP_BOUNDS_THREAT_MODEL_H_
#define ROBUST_CP_BOUNDS_THREAT_MODEL_H_

#include <optional>
#include <span>
#include <string>
#include <variant>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "robust_cp/bounds/region_table.h"
#include "robust_cp/smoothing/noise.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

struct L2Ball {
  double r = 0.0;
};

// At most r_a bits switched 0 -> 1 and at most r_d bits switched 1 -> 0.
struct BinaryBall {
  int r_a = 0;
  int r_d = 0;
};

using ThreatModel = std::variant<L2Ball, BinaryBall>;

enum class BoundDirection { kUpper, kLower };
// kMean bounds use only the smoothed mean; kCdf bounds use the binned CDF.
enum class BoundKind { kMean, kCdf };
// Which input the statistics were estimated at. Statistics at the observed
// (possibly perturbed) input bound the clean input, which reverses the roles
// of additions and deletions.
enum class InputView { kClean, kObserved };

std::string BoundKindName(BoundKind kind);
std::string DescribeThreatModel(const ThreatModel& model);

struct BoundPair {
  double lower = 0.0;
  double upper = 1.0;
};

// Returns FailedPrecondition when the scheme and threat model do not pair up.
absl::Status CheckCompatible(const SmoothingScheme& scheme,
                             const ThreatModel& model);

// Bounds for a fixed (scheme, threat model, view). The sparse region table is
// built once at construction. Immutable and safe to share across threads.
class Certifier {
 public:
  static absl::StatusOr<Certifier> Create(const SmoothingScheme& scheme,
                                          const ThreatModel& model,
                                          InputView view);

  double MeanBound(double p, BoundDirection direction) const;
  double CdfBound(const BinGrid& grid, std::span<const double> cdf,
                  BoundDirection direction) const;
  double Bound(const ScoreDistribution& dist, BoundKind kind,
               BoundDirection direction) const;
  BoundPair Pair(const ScoreDistribution& dist, BoundKind kind) const;

  // True when the ball has zero radius and every bound reduces to its
  // statistic.
  bool trivial() const { return trivial_; }
  const std::optional<RegionTable>& region_table() const { return table_; }

 private:
  Certifier() = default;

  double sigma_ = 1.0;
  double r_ = 0.0;
  std::optional<RegionTable> table_;
  bool trivial_ = true;
};

// One-shot convenience wrapper: the certificate from statistics observed at
// a possibly perturbed input (radii swapped for the binary ball).
absl::StatusOr<double> BoundForObserved(const ScoreDistribution& dist,
                                        const ThreatModel& model,
                                        const SmoothingScheme& scheme,
                                        BoundDirection direction,
                                        BoundKind kind = BoundKind::kCdf);

}  // namespace robust_cp

#endif  // ROBUST_CP_BOUNDS_THREAT_MODEL_H_
