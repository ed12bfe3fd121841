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

#include "robust_cp/bounds/normal.h"

#include <cmath>
#include <limits>

#include "boost/math/special_functions/erf.hpp"

namespace robust_cp {
namespace {

using NoThrowPolicy = boost::math::policies::policy<
    boost::math::policies::overflow_error<
        boost::math::policies::errno_on_error>,
    boost::math::policies::domain_error<boost::math::policies::errno_on_error>,
    boost::math::policies::pole_error<boost::math::policies::errno_on_error>>;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double NormalQuantile(double p) {
  if (p <= 0.0) return -kInf;
  if (p >= 1.0) return kInf;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p, NoThrowPolicy());
}

double ShiftProbability(double p, double shift) {
  if (shift == 0.0 || p <= 0.0 || p >= 1.0) return p;
  return NormalCdf(NormalQuantile(p) + shift);
}

}  // namespace robust_cp
