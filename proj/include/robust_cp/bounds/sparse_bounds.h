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

// Worst-case smoothed scores under sparse flip smoothing. Each bound solves
//   max / min  h^T t~   s.t.  h^T t = p,  0 <= h <= 1
// over the likelihood-ratio regions, greedily in ratio order.

#ifndef ROBUST_CP_BOUNDS_SPARSE_BOUNDS_H_
#define ROBUST_CP_BOUNDS_SPARSE_BOUNDS_H_

#include <span>

#include "robust_cp/bounds/region_table.h"
#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

double SparseMeanUpper(double p, const RegionTable& table);
double SparseMeanLower(double p, const RegionTable& table);

double SparseCdfUpper(const ScoreDistribution& dist, const RegionTable& table);
double SparseCdfLower(const ScoreDistribution& dist, const RegionTable& table);

double SparseCdfUpper(const BinGrid& grid, std::span<const double> cdf,
                      const RegionTable& table);
double SparseCdfLower(const BinGrid& grid, std::span<const double> cdf,
                      const RegionTable& table);

}  // namespace robust_cp

#endif  // ROBUST_CP_BOUNDS_SPARSE_BOUNDS_H_
