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

#ifndef ROBUST_CP_SMOOTHING_NOISE_H_
#define ROBUST_CP_SMOOTHING_NOISE_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "robust_cp/random/philox.h"

namespace robust_cp {

// Isotropic Gaussian noise with standard deviation `sigma`.
struct GaussianNoise {
  double sigma = 0.25;
};

// Sparsity-aware Bernoulli flips: a 0-bit becomes 1 with probability p0 and a
// 1-bit becomes 0 with probability p1.
struct SparseFlipNoise {
  double p0 = 0.01;
  double p1 = 0.6;
};

using SmoothingScheme = std::variant<GaussianNoise, SparseFlipNoise>;

absl::Status ValidateScheme(const SmoothingScheme& scheme);
std::string DescribeScheme(const SmoothingScheme& scheme);

// x + delta with delta ~ N(0, sigma^2 I).
std::vector<double> SampleGaussian(std::span<const double> x, double sigma,
                                   RngStream& rng);

// Flips each bit of the binary vector `x` independently.
absl::StatusOr<std::vector<double>> SampleSparse(std::span<const double> x,
                                                 double p0, double p1,
                                                 RngStream& rng);

absl::Status ValidateBinary(std::span<const double> x);

// Writes one noisy copy of `x` into `out` (same size). Inputs for the sparse
// scheme must already be validated as binary.
void SampleNoisy(const SmoothingScheme& scheme, std::span<const double> x,
                 RngStream& rng, std::span<double> out);

}  // namespace robust_cp

#endif  // ROBUST_CP_SMOOTHING_NOISE_H_
