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

#include "robust_cp/bounds/threat_model.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "robust_cp/bounds/gaussian_bounds.h"
#include "robust_cp/bounds/sparse_bounds.h"

namespace robust_cp {

std::string BoundKindName(BoundKind kind) {
  return kind == BoundKind::kMean ? "mean" : "cdf";
}

std::string DescribeThreatModel(const ThreatModel& model) {
  if (const auto* l2 = std::get_if<L2Ball>(&model)) {
    return absl::StrCat("l2(r=", l2->r, ")");
  }
  const auto& ball = std::get<BinaryBall>(model);
  return absl::StrCat("binary(r_a=", ball.r_a, ", r_d=", ball.r_d, ")");
}

absl::Status CheckCompatible(const SmoothingScheme& scheme,
                             const ThreatModel& model) {
  if (absl::Status s = ValidateScheme(scheme); !s.ok()) return s;
  const bool gaussian = std::holds_alternative<GaussianNoise>(scheme);
  const bool l2 = std::holds_alternative<L2Ball>(model);
  if (gaussian != l2) {
    return absl::FailedPreconditionError(
        absl::StrCat("smoothing scheme ", DescribeScheme(scheme),
                     " cannot certify threat model ",
                     DescribeThreatModel(model)));
  }
  if (l2) {
    const double r = std::get<L2Ball>(model).r;
    if (!(r >= 0.0) || !std::isfinite(r)) {
      return absl::InvalidArgumentError(
          absl::StrCat("l2 radius ", r, " must be finite and >= 0"));
    }
  } else {
    const auto& ball = std::get<BinaryBall>(model);
    if (ball.r_a < 0 || ball.r_d < 0) {
      return absl::InvalidArgumentError("binary radii must be >= 0");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<Certifier> Certifier::Create(const SmoothingScheme& scheme,
                                            const ThreatModel& model,
                                            InputView view) {
  if (absl::Status s = CheckCompatible(scheme, model); !s.ok()) return s;
  Certifier certifier;
  if (const auto* l2 = std::get_if<L2Ball>(&model)) {
    certifier.sigma_ = std::get<GaussianNoise>(scheme).sigma;
    certifier.r_ = l2->r;
    certifier.trivial_ = l2->r == 0.0;
    return certifier;
  }
  const auto& noise = std::get<SparseFlipNoise>(scheme);
  BinaryBall ball = std::get<BinaryBall>(model);
  if (view == InputView::kObserved) std::swap(ball.r_a, ball.r_d);
  absl::StatusOr<RegionTable> table =
      BuildRegionTable(ball.r_a, ball.r_d, noise.p0, noise.p1);
  if (!table.ok()) return table.status();
  certifier.table_ = *std::move(table);
  certifier.trivial_ = ball.r_a == 0 && ball.r_d == 0;
  return certifier;
}

double Certifier::MeanBound(double p, BoundDirection direction) const {
  if (trivial_) return p;
  const bool upper = direction == BoundDirection::kUpper;
  if (table_.has_value()) {
    return upper ? SparseMeanUpper(p, *table_) : SparseMeanLower(p, *table_);
  }
  return upper ? GaussianMeanUpper(p, r_, sigma_)
               : GaussianMeanLower(p, r_, sigma_);
}

double Certifier::CdfBound(const BinGrid& grid, std::span<const double> cdf,
                           BoundDirection direction) const {
  const bool upper = direction == BoundDirection::kUpper;
  if (table_.has_value()) {
    return upper ? SparseCdfUpper(grid, cdf, *table_)
                 : SparseCdfLower(grid, cdf, *table_);
  }
  return upper ? GaussianCdfUpper(grid, cdf, r_, sigma_)
               : GaussianCdfLower(grid, cdf, r_, sigma_);
}

double Certifier::Bound(const ScoreDistribution& dist, BoundKind kind,
                        BoundDirection direction) const {
  return kind == BoundKind::kMean ? MeanBound(dist.mean, direction)
                                  : CdfBound(dist.grid, dist.cdf, direction);
}

BoundPair Certifier::Pair(const ScoreDistribution& dist,
                          BoundKind kind) const {
  BoundPair pair{Bound(dist, kind, BoundDirection::kLower),
                 Bound(dist, kind, BoundDirection::kUpper)};
  pair.lower = std::min(pair.lower, pair.upper);
  return pair;
}

absl::StatusOr<double> BoundForObserved(const ScoreDistribution& dist,
                                        const ThreatModel& model,
                                        const SmoothingScheme& scheme,
                                        BoundDirection direction,
                                        BoundKind kind) {
  absl::StatusOr<Certifier> certifier =
      Certifier::Create(scheme, model, InputView::kObserved);
  if (!certifier.ok()) return certifier.status();
  if (absl::Status s = ValidateDistribution(dist); !s.ok()) return s;
  return certifier->Bound(dist, kind, direction);
}

}  // namespace robust_cp
