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

// Reference computations used only by tests. None of them share code with the
// library routines they check.

#ifndef ROBUST_CP_TESTS_ORACLES_H_
#define ROBUST_CP_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "boost/math/constants/constants.hpp"
#include "boost/multiprecision/cpp_bin_float.hpp"

namespace robust_cp::testing {

using HighPrecision = boost::multiprecision::cpp_bin_float_50;

// Standard normal CDF in 50-digit arithmetic.
inline HighPrecision PhiHp(const HighPrecision& x) {
  return boost::multiprecision::erfc(-x / boost::multiprecision::sqrt(
                                              HighPrecision(2))) /
         2;
}

inline double Phi(double x) {
  return static_cast<double>(PhiHp(HighPrecision(x)));
}

// Standard normal quantile: a double-precision bisection bracket refined by
// Newton steps on the 50-digit CDF.
inline HighPrecision PhiInverseHp(const HighPrecision& p) {
  const double target = static_cast<double>(p);
  double lo = -40.0, hi = 40.0;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (0.5 * std::erfc(-mid / std::sqrt(2.0)) < target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  HighPrecision x = 0.5 * (lo + hi);
  const HighPrecision inv_sqrt_2pi =
      1 / boost::multiprecision::sqrt(
              2 * boost::math::constants::pi<HighPrecision>());
  for (int i = 0; i < 4; ++i) {
    const HighPrecision density =
        inv_sqrt_2pi * boost::multiprecision::exp(-x * x / 2);
    x -= (PhiHp(x) - p) / density;
  }
  return x;
}

// Phi(Phi^{-1}(p) + shift) without double-precision rounding in between.
inline double ShiftOracle(double p, double shift) {
  if (p <= 0.0 || p >= 1.0) return p;
  return static_cast<double>(
      PhiHp(PhiInverseHp(HighPrecision(p)) + HighPrecision(shift)));
}

struct OracleRegion {
  double mass = 0.0;
  double mass_tilde = 0.0;
  double ratio = 0.0;
};

// Enumerates every noisy value of the r_a + r_d disagreeing bits, computes the
// probability of each pattern at x (deleted bits 1, added bits 0) and at x~
// (deleted bits 0, added bits 1), and merges patterns with equal likelihood
// ratio. Returns regions sorted by ascending ratio; zero-mass patterns are
// dropped.
inline std::vector<OracleRegion> EnumerateRegions(int r_a, int r_d, double p0,
                                                  double p1) {
  const int bits = r_a + r_d;
  std::vector<OracleRegion> patterns;
  for (unsigned pattern = 0; pattern < (1u << bits); ++pattern) {
    double at_x = 1.0;
    double at_x_tilde = 1.0;
    for (int bit = 0; bit < bits; ++bit) {
      const bool one = (pattern >> bit) & 1u;
      if (bit < r_d) {
        at_x *= one ? 1.0 - p1 : p1;
        at_x_tilde *= one ? p0 : 1.0 - p0;
      } else {
        at_x *= one ? p0 : 1.0 - p0;
        at_x_tilde *= one ? 1.0 - p1 : p1;
      }
    }
    if (at_x == 0.0 && at_x_tilde == 0.0) continue;
    patterns.push_back({at_x, at_x_tilde,
                        at_x_tilde == 0.0
                            ? std::numeric_limits<double>::infinity()
                            : at_x / at_x_tilde});
  }
  std::sort(patterns.begin(), patterns.end(),
            [](const OracleRegion& a, const OracleRegion& b) {
              return a.ratio < b.ratio;
            });
  std::vector<OracleRegion> merged;
  for (const OracleRegion& p : patterns) {
    if (!merged.empty() &&
        (merged.back().ratio == p.ratio ||
         std::abs(merged.back().ratio - p.ratio) <=
             1e-9 * std::max(merged.back().ratio, p.ratio))) {
      merged.back().mass += p.mass;
      merged.back().mass_tilde += p.mass_tilde;
    } else {
      merged.push_back(p);
    }
  }
  return merged;
}

// Solves  max (or min) sum_i h_i g_i  s.t.  sum_i h_i c_i = budget,
// 0 <= h_i <= 1  by enumerating every basic solution: at most one coordinate
// is fractional and all others sit at a bound. Suitable for a handful of
// variables only.
inline double VertexLp(const std::vector<double>& cost,
                       const std::vector<double>& gain, double budget,
                       bool maximize) {
  const int n = static_cast<int>(cost.size());
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  auto consider = [&](double value) {
    best = maximize ? std::max(best, value) : std::min(best, value);
  };
  constexpr double kFeasTol = 1e-12;
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    double used = 0.0, value = 0.0;
    for (int i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) {
        used += cost[i];
        value += gain[i];
      }
    }
    if (std::abs(used - budget) <= kFeasTol) consider(value);
    for (int f = 0; f < n; ++f) {
      if (((mask >> f) & 1u) || cost[f] <= 0.0) continue;
      const double h = (budget - used) / cost[f];
      if (h >= -kFeasTol && h <= 1.0 + kFeasTol) {
        consider(value + std::clamp(h, 0.0, 1.0) * gain[f]);
      }
    }
  }
  return best;
}

}  // namespace robust_cp::testing

#endif  // ROBUST_CP_TESTS_ORACLES_H_
