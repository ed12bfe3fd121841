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

#ifndef ROBUST_CP_BOUNDS_REGION_TABLE_H_
#define ROBUST_CP_BOUNDS_REGION_TABLE_H_

#include <vector>

#include "absl/status/statusor.h"

namespace robust_cp {

// One region of constant likelihood ratio between the flip distributions at
// a clean input x and at the canonical perturbed input x~ (x with r_d ones
// deleted and r_a zeros added). Only the r_a + r_d disagreeing bits matter.
struct Region {
  int index = 0;           // i = (r_d - a) + b
  double mass = 0.0;       // t_i, probability under the noise at x
  double mass_tilde = 0.0; // t~_i, probability under the noise at x~
  double ratio = 1.0;      // c_i = t_i / t~_i
  double log_mass = 0.0;
  double log_mass_tilde = 0.0;
  double log_ratio = 0.0;
};

// Regions sorted by ascending likelihood ratio.
struct RegionTable {
  int r_a = 0;
  int r_d = 0;
  double p0 = 0.0;
  double p1 = 0.0;
  std::vector<Region> regions;

  int size() const { return static_cast<int>(regions.size()); }
};

// Masses are accumulated in log space with compensated summation. Radii are
// limited to r_a + r_d <= 4096.
absl::StatusOr<RegionTable> BuildRegionTable(int r_a, int r_d, double p0,
                                             double p1);

}  // namespace robust_cp

#endif  // ROBUST_CP_BOUNDS_REGION_TABLE_H_
