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

#include "robust_cp/bounds/region_table.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"

namespace robust_cp {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// k * log(v) with 0 * log(0) = 0.
double XLogY(int k, double v) {
  if (k == 0) return 0.0;
  return k * std::log(v);
}

double LogChoose(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
         std::lgamma(n - k + 1.0);
}

// log(sum(exp(terms))) using a Neumaier-compensated sum of shifted terms.
double LogSumExp(const std::vector<double>& terms) {
  double peak = kNegInf;
  for (const double t : terms) peak = std::max(peak, t);
  if (peak == kNegInf) return kNegInf;
  double sum = 0.0;
  double compensation = 0.0;
  for (const double t : terms) {
    const double x = std::exp(t - peak);
    const double next = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      compensation += (sum - next) + x;
    } else {
      compensation += (x - next) + sum;
    }
    sum = next;
  }
  return peak + std::log(sum + compensation);
}

}  // namespace

absl::StatusOr<RegionTable> BuildRegionTable(int r_a, int r_d, double p0,
                                             double p1) {
  if (r_a < 0 || r_d < 0 || r_a + r_d > 4096) {
    return absl::InvalidArgumentError(
        absl::StrCat("radii r_a=", r_a, " r_d=", r_d, " out of range"));
  }
  if (!(p0 >= 0.0 && p0 < 1.0) || !(p1 >= 0.0 && p1 < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("flip probabilities p0=", p0, " p1=", p1,
                     " must lie in [0, 1)"));
  }
  const int num_regions = r_a + r_d + 1;
  std::vector<std::vector<double>> log_terms(num_regions);
  std::vector<std::vector<double>> log_terms_tilde(num_regions);
  // a: deleted bits that are still 1 after noise; b: added bits that are 1.
  for (int a = 0; a <= r_d; ++a) {
    for (int b = 0; b <= r_a; ++b) {
      const int i = (r_d - a) + b;
      const double choose = LogChoose(r_d, a) + LogChoose(r_a, b);
      log_terms[i].push_back(choose + XLogY(a, 1.0 - p1) +
                             XLogY(r_d - a, p1) + XLogY(b, p0) +
                             XLogY(r_a - b, 1.0 - p0));
      log_terms_tilde[i].push_back(choose + XLogY(a, p0) +
                                   XLogY(r_d - a, 1.0 - p0) +
                                   XLogY(b, 1.0 - p1) + XLogY(r_a - b, p1));
    }
  }
  RegionTable table{r_a, r_d, p0, p1, {}};
  table.regions.reserve(num_regions);
  for (int i = 0; i < num_regions; ++i) {
    Region region;
    region.index = i;
    region.log_mass = LogSumExp(log_terms[i]);
    region.log_mass_tilde = LogSumExp(log_terms_tilde[i]);
    region.mass = std::exp(region.log_mass);
    region.mass_tilde = std::exp(region.log_mass_tilde);
    region.log_ratio = XLogY(i - r_d, p0 / (1.0 - p1)) +
                       XLogY(i - r_a, p1 / (1.0 - p0));
    if (std::isnan(region.log_ratio)) {
      // Both flip probabilities vanish; the region then has no mass on
      // either side unless it is the single shared region.
      region.log_ratio = region.log_mass == kNegInf ||
                                 region.log_mass_tilde == kNegInf
                             ? region.log_mass - region.log_mass_tilde
                             : 0.0;
      if (std::isnan(region.log_ratio)) region.log_ratio = 0.0;
    }
    region.ratio = std::exp(region.log_ratio);
    table.regions.push_back(region);
  }
  std::stable_sort(table.regions.begin(), table.regions.end(),
                   [](const Region& x, const Region& y) {
                     return x.log_ratio < y.log_ratio;
                   });
  return table;
}

}  // namespace robust_cp
