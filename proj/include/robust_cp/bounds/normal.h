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

#ifndef ROBUST_CP_BOUNDS_NORMAL_H_
#define ROBUST_CP_BOUNDS_NORMAL_H_

namespace robust_cp {

// Standard normal CDF.
double NormalCdf(double x);

// Standard normal quantile; returns -inf at 0 and +inf at 1.
double NormalQuantile(double p);

// Phi(Phi^{-1}(p) + shift), with p in {0, 1} returned unchanged and
// shift == 0 returning p exactly.
double ShiftProbability(double p, double shift);

}  // namespace robust_cp

#endif  // ROBUST_CP_BOUNDS_NORMAL_H_
