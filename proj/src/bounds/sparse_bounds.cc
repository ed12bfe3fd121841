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

#include "robust_cp/bounds/sparse_bounds.h"

#include <algorithm>

#include "robust_cp/bounds/gaussian_bounds.h"

namespace robust_cp {
namespace {

// Spends the budget `p` of t-mass over `order` (a range of regions), taking
// each region fully until the budget runs out. Regions with t = 0 are free and
// taken whenever `take_free` is set.
template <typename It>
double GreedyFill(double p, It begin, It end, bool take_free) {
  double remaining = p;
  double gain = 0.0;
  for (It it = begin; it != end; ++it) {
    if (it->mass == 0.0) {
      if (take_free) gain += it->mass_tilde;
      continue;
    }
    if (remaining <= 0.0) continue;
    const double fraction = std::min(1.0, remaining / it->mass);
    gain += fraction * it->mass_tilde;
    remaining -= fraction * it->mass;
  }
  return std::clamp(gain, 0.0, 1.0);
}

}  // namespace

double SparseMeanUpper(double p, const RegionTable& table) {
  // Ascending ratio = largest t~ per unit of t first.
  return GreedyFill(p, table.regions.begin(), table.regions.end(),
                    /*take_free=*/true);
}

double SparseMeanLower(double p, const RegionTable& table) {
  return GreedyFill(p, table.regions.rbegin(), table.regions.rend(),
                    /*take_free=*/false);
}

double SparseCdfUpper(const BinGrid& grid, std::span<const double> cdf,
                      const RegionTable& table) {
  return AndersonUpper(grid, cdf, [&table](double p) {
    return SparseMeanLower(p, table);
  });
}

double SparseCdfLower(const BinGrid& grid, std::span<const double> cdf,
                      const RegionTable& table) {
  return AndersonLower(grid, cdf, [&table](double p) {
    return SparseMeanUpper(p, table);
  });
}

double SparseCdfUpper(const ScoreDistribution& dist,
                      const RegionTable& table) {
  return SparseCdfUpper(dist.grid, dist.cdf, table);
}

double SparseCdfLower(const ScoreDistribution& dist,
                      const RegionTable& table) {
  return SparseCdfLower(dist.grid, dist.cdf, table);
}

}  // namespace robust_cp
