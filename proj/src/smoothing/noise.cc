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

#include "robust_cp/smoothing/noise.h"

#include <cmath>

#include "absl/strings/str_cat.h"
#include "boost/random/normal_distribution.hpp"

namespace robust_cp {
namespace {

struct SchemeValidator {
  absl::Status operator()(const GaussianNoise& g) const {
    if (!(g.sigma > 0.0) || !std::isfinite(g.sigma)) {
      return absl::InvalidArgumentError(
          absl::StrCat("gaussian sigma=", g.sigma, " must be positive"));
    }
    return absl::OkStatus();
  }
  absl::Status operator()(const SparseFlipNoise& s) const {
    if (!(s.p0 >= 0.0 && s.p0 < 1.0) || !(s.p1 >= 0.0 && s.p1 < 1.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "flip probabilities p0=", s.p0, " p1=", s.p1, " must lie in [0, 1)"));
    }
    return absl::OkStatus();
  }
};

}  // namespace

absl::Status ValidateScheme(const SmoothingScheme& scheme) {
  return std::visit(SchemeValidator{}, scheme);
}

std::string DescribeScheme(const SmoothingScheme& scheme) {
  if (const auto* g = std::get_if<GaussianNoise>(&scheme)) {
    return absl::StrCat("gaussian(sigma=", g->sigma, ")");
  }
  const auto& s = std::get<SparseFlipNoise>(scheme);
  return absl::StrCat("sparse(p0=", s.p0, ", p1=", s.p1, ")");
}

absl::Status ValidateBinary(std::span<const double> x) {
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] != 0.0 && x[i] != 1.0) {
      return absl::InvalidArgumentError(
          absl::StrCat("entry ", i, " = ", x[i], " is not binary"));
    }
  }
  return absl::OkStatus();
}

std::vector<double> SampleGaussian(std::span<const double> x, double sigma,
                                   RngStream& rng) {
  std::vector<double> out(x.size());
  SampleNoisy(GaussianNoise{sigma}, x, rng, out);
  return out;
}

absl::StatusOr<std::vector<double>> SampleSparse(std::span<const double> x,
                                                 double p0, double p1,
                                                 RngStream& rng) {
  if (absl::Status s = ValidateBinary(x); !s.ok()) return s;
  if (absl::Status s = ValidateScheme(SparseFlipNoise{p0, p1}); !s.ok()) {
    return s;
  }
  std::vector<double> out(x.size());
  SampleNoisy(SparseFlipNoise{p0, p1}, x, rng, out);
  return out;
}

void SampleNoisy(const SmoothingScheme& scheme, std::span<const double> x,
                 RngStream& rng, std::span<double> out) {
  if (const auto* g = std::get_if<GaussianNoise>(&scheme)) {
    boost::random::normal_distribution<double> normal(0.0, g->sigma);
    for (size_t i = 0; i < x.size(); ++i) out[i] = x[i] + normal(rng);
    return;
  }
  const auto& s = std::get<SparseFlipNoise>(scheme);
  for (size_t i = 0; i < x.size(); ++i) {
    const double flip_prob = x[i] == 0.0 ? s.p0 : s.p1;
    const bool flip = rng.Uniform() < flip_prob;
    out[i] = flip ? 1.0 - x[i] : x[i];
  }
}

}  // namespace robust_cp
