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

#include "robust_cp/bounds/gaussian_bounds.h"

#include <algorithm>

#include "robust_cp/bounds/normal.h"

namespace robust_cp {

double GaussianMeanUpper(double p, double r, double sigma) {
  return ShiftProbability(p, r / sigma);
}

double GaussianMeanLower(double p, double r, double sigma) {
  return ShiftProbability(p, -r / sigma);
}

double AndersonUpper(const BinGrid& grid, std::span<const double> cdf,
                     const std::function<double(double)>& row_bound) {
  const int m = grid.size();
  double value = grid.edge(m - 1);
  for (int j = 1; j <= m - 2; ++j) {
    const double width = grid.edge(j + 1) - grid.edge(j);
    if (width == 0.0) continue;
    value -= row_bound(cdf[j]) * width;
  }
  return std::clamp(value, 0.0, 1.0);
}

double AndersonLower(const BinGrid& grid, std::span<const double> cdf,
                     const std::function<double(double)>& row_bound) {
  const int m = grid.size();
  double value = grid.edge(m - 2);
  for (int j = 1; j <= m - 2; ++j) {
    const double width = grid.edge(j) - grid.edge(j - 1);
    if (width == 0.0) continue;
    value -= row_bound(cdf[j]) * width;
  }
  return std::clamp(value, 0.0, 1.0);
}

double GaussianCdfUpper(const BinGrid& grid, std::span<const double> cdf,
                        double r, double sigma) {
  const double shift = -r / sigma;
  return AndersonUpper(grid, cdf,
                       [shift](double p) { return ShiftProbability(p, shift); });
}

double GaussianCdfLower(const BinGrid& grid, std::span<const double> cdf,
                        double r, double sigma) {
  const double shift = r / sigma;
  return AndersonLower(grid, cdf,
                       [shift](double p) { return ShiftProbability(p, shift); });
}

double GaussianCdfUpper(const ScoreDistribution& dist, double r,
                        double sigma) {
  return GaussianCdfUpper(dist.grid, dist.cdf, r, sigma);
}

double GaussianCdfLower(const ScoreDistribution& dist, double r,
                        double sigma) {
  return GaussianCdfLower(dist.grid, dist.cdf, r, sigma);
}

}  // namespace robust_cp
