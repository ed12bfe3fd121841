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

#include "robust_cp/correction/confidence.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace robust_cp {
namespace {

absl::Status CheckEta(double eta) {
  if (!(eta > 0.0 && eta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("failure probability ", eta, " outside (0, 1)"));
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<double> HoeffdingRadius(int64_t m, double eta) {
  if (m < 1) return absl::InvalidArgumentError("sample count must be >= 1");
  if (absl::Status s = CheckEta(eta); !s.ok()) return s;
  return std::sqrt(std::log(2.0 / eta) / (2.0 * static_cast<double>(m)));
}

absl::StatusOr<double> BernsteinRadius(int64_t m, double variance,
                                       double eta) {
  if (m < 2) return absl::InvalidArgumentError("sample count must be >= 2");
  if (!(variance >= 0.0)) {
    return absl::InvalidArgumentError("variance must be >= 0");
  }
  if (absl::Status s = CheckEta(eta); !s.ok()) return s;
  const double log_term = std::log(4.0 / eta);
  const double md = static_cast<double>(m);
  return std::sqrt(2.0 * variance * log_term / md) +
         7.0 * log_term / (3.0 * (md - 1.0));
}

absl::StatusOr<double> DkwRadius(int64_t m, double eta) {
  return HoeffdingRadius(m, eta);
}

absl::Status BudgetLedger::Charge(std::string label, double amount,
                                  int64_t count) {
  if (!(amount >= 0.0) || count < 0) {
    return absl::InvalidArgumentError("budget charges must be nonnegative");
  }
  const double total = consumed_ + amount * static_cast<double>(count);
  if (total > eta_ * (1.0 + 1e-12)) {
    return absl::InternalError(absl::StrCat(
        "failure budget overspent: ", total, " > eta = ", eta_, " after '",
        label, "'"));
  }
  consumed_ = total;
  entries_.push_back({std::move(label), amount, count});
  return absl::OkStatus();
}

CorrectedDistribution CorrectDistributionWithRadii(
    const ScoreDistribution& dist, double mean_radius, double cdf_radius) {
  CorrectedDistribution out;
  out.base = dist;
  out.mean_radius = mean_radius;
  out.cdf_radius = cdf_radius;
  out.mean_lo = std::max(dist.mean - mean_radius, 0.0);
  out.mean_hi = std::min(dist.mean + mean_radius, 1.0);
  const size_t m = dist.cdf.size();
  out.cdf_lo.resize(m);
  out.cdf_hi.resize(m);
  for (size_t j = 0; j < m; ++j) {
    out.cdf_lo[j] = std::clamp(dist.cdf[j] - cdf_radius, 0.0, 1.0);
    out.cdf_hi[j] = std::clamp(dist.cdf[j] + cdf_radius, 0.0, 1.0);
    if (j > 0) {
      out.cdf_lo[j] = std::max(out.cdf_lo[j], out.cdf_lo[j - 1]);
      out.cdf_hi[j] = std::max(out.cdf_hi[j], out.cdf_hi[j - 1]);
    }
  }
  return out;
}

absl::StatusOr<CorrectedDistribution> CorrectDistribution(
    const ScoreDistribution& dist, double eta_part, CorrectionFlavor flavor) {
  if (absl::Status s = CheckEta(eta_part); !s.ok()) return s;
  const double part =
      flavor == CorrectionFlavor::kBoth ? eta_part / 2.0 : eta_part;
  double mean_radius = 0.0;
  double cdf_radius = 0.0;
  if (flavor != CorrectionFlavor::kCdfDkw) {
    absl::StatusOr<double> r =
        BernsteinRadius(dist.sample_count, dist.variance, part);
    if (!r.ok()) return r.status();
    mean_radius = *r;
  }
  if (flavor != CorrectionFlavor::kMeanBernstein) {
    absl::StatusOr<double> r = DkwRadius(dist.sample_count, part);
    if (!r.ok()) return r.status();
    cdf_radius = *r;
  }
  return CorrectDistributionWithRadii(dist, mean_radius, cdf_radius);
}

double CorrectedBound(const CorrectedDistribution& corrected,
                      const Certifier& certifier, BoundKind kind,
                      BoundDirection direction) {
  const bool upper = direction == BoundDirection::kUpper;
  if (kind == BoundKind::kMean) {
    return certifier.MeanBound(upper ? corrected.mean_hi : corrected.mean_lo,
                               direction);
  }
  return certifier.CdfBound(corrected.base.grid,
                            upper ? corrected.cdf_lo : corrected.cdf_hi,
                            direction);
}

CorrectionFlavor FlavorFor(BoundKind kind) {
  return kind == BoundKind::kMean ? CorrectionFlavor::kMeanBernstein
                                  : CorrectionFlavor::kCdfDkw;
}

absl::StatusOr<double> CorrectedBoundForObserved(const ScoreDistribution& dist,
                                                 const ThreatModel& model,
                                                 const SmoothingScheme& scheme,
                                                 BoundDirection direction,
                                                 BoundKind kind,
                                                 double eta_part) {
  absl::StatusOr<Certifier> certifier =
      Certifier::Create(scheme, model, InputView::kObserved);
  if (!certifier.ok()) return certifier.status();
  if (absl::Status s = ValidateDistribution(dist); !s.ok()) return s;
  absl::StatusOr<CorrectedDistribution> corrected =
      CorrectDistribution(dist, eta_part, FlavorFor(kind));
  if (!corrected.ok()) return corrected.status();
  return CorrectedBound(*corrected, *certifier, kind, direction);
}

}  // namespace robust_cp
