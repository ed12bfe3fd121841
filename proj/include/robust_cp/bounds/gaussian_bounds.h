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

// Worst-case smoothed scores within an L2 ball of radius r under Gaussian
// smoothing with scale sigma.

#ifndef ROBUST_CP_BOUNDS_GAUSSIAN_BOUNDS_H_
#define ROBUST_CP_BOUNDS_GAUSSIAN_BOUNDS_H_

#include <functional>
#include <span>

#include "robust_cp/smoothing/score_distribution.h"

namespace robust_cp {

double GaussianMeanUpper(double p, double r, double sigma);
double GaussianMeanLower(double p, double r, double sigma);

double GaussianCdfUpper(const ScoreDistribution& dist, double r, double sigma);
double GaussianCdfLower(const ScoreDistribution& dist, double r, double sigma);

// Same, for an explicit CDF vector aligned with `grid` (e.g. a corrected band).
double GaussianCdfUpper(const BinGrid& grid, std::span<const double> cdf,
                        double r, double sigma);
double GaussianCdfLower(const BinGrid& grid, std::span<const double> cdf,
                        double r, double sigma);

// Combines per-edge worst-case CDF values into a mean bound:
//   upper: b_m     - sum_{j=2}^{m-1} F_j (b_{j+1} - b_j)
//   lower: b_{m-1} - sum_{j=2}^{m-1} F_j (b_j - b_{j-1})
// `row_bound` maps the observed p_j to the worst-case F_j. Results are clamped
// to [0, 1].
double AndersonUpper(const BinGrid& grid, std::span<const double> cdf,
                     const std::function<double(double)>& row_bound);
double AndersonLower(const BinGrid& grid, std::span<const double> cdf,
                     const std::function<double(double)>& row_bound);

}  // namespace robust_cp

#endif  // ROBUST_CP_BOUNDS_GAUSSIAN_BOUNDS_H_
