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

#include "robust_cp/harness/synthetic_task.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "boost/random/normal_distribution.hpp"
#include "robust_cp/random/philox.h"

namespace robust_cp {
namespace {

constexpr uint64_t kPurposeTaskLayout = 0x7461736b;  // "task"
constexpr uint64_t kPurposeTaskPoint = 0x706f696e;   // "poin"

}  // namespace

std::string TaskKindName(TaskKind kind) {
  return kind == TaskKind::kGaussianMixture ? "gaussian-mixture"
                                            : "binary-linear";
}

absl::StatusOr<TaskKind> ParseTaskKind(std::string_view name) {
  if (name == "gaussian-mixture") return TaskKind::kGaussianMixture;
  if (name == "binary-linear") return TaskKind::kBinaryLinear;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown task '", std::string(name), "'"));
}

absl::Status ValidateTaskSpec(const TaskSpec& spec) {
  const bool gm = spec.kind == TaskKind::kGaussianMixture;
  const int max_dims = gm ? 16 : 64;
  if (spec.num_classes < 2 || spec.num_classes > 10) {
    return absl::InvalidArgumentError(
        absl::StrCat("classes=", spec.num_classes, " outside [2, 10]"));
  }
  if (spec.dims < 1 || spec.dims > max_dims) {
    return absl::InvalidArgumentError(
        absl::StrCat("dims=", spec.dims, " outside [1, ", max_dims, "] for ",
                     TaskKindName(spec.kind)));
  }
  if (!(spec.logit_scale > 0.0) || !std::isfinite(spec.logit_scale)) {
    return absl::InvalidArgumentError("logit_scale must be positive");
  }
  if (gm) {
    if (!(spec.separation >= 0.0) || !(spec.cluster_std > 0.0)) {
      return absl::InvalidArgumentError(
          "separation must be >= 0 and cluster_std > 0");
    }
  } else {
    auto open_unit = [](double p) { return p > 0.0 && p < 1.0; };
    if (!open_unit(spec.base_rate) || !open_unit(spec.signal_rate)) {
      return absl::InvalidArgumentError(
          "base_rate and signal_rate must lie in (0, 1)");
    }
    if (spec.informative_bits < 1 ||
        spec.informative_bits * spec.num_classes > spec.dims) {
      return absl::InvalidArgumentError(absl::StrCat(
          "informative_bits=", spec.informative_bits,
          " times classes=", spec.num_classes, " exceeds dims=", spec.dims));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<SyntheticTask> SyntheticTask::Create(const TaskSpec& spec) {
  if (absl::Status s = ValidateTaskSpec(spec); !s.ok()) return s;
  SyntheticTask task(spec);
  const int k = spec.num_classes;
  const int d = spec.dims;
  task.centers_.assign(static_cast<size_t>(k) * d, 0.0);
  task.weights_.assign(static_cast<size_t>(k) * d, 0.0);
  task.bias_.assign(k, 0.0);
  Philox4x64 rng(spec.seed, kPurposeTaskLayout, 0);

  if (spec.kind == TaskKind::kGaussianMixture) {
    boost::random::normal_distribution<double> normal;
    const double s2 = spec.cluster_std * spec.cluster_std;
    for (int c = 0; c < k; ++c) {
      double* mu = &task.centers_[static_cast<size_t>(c) * d];
      double norm2 = 0.0;
      for (int i = 0; i < d; ++i) {
        mu[i] = normal(rng);
        norm2 += mu[i] * mu[i];
      }
      const double scale = spec.separation / std::sqrt(std::max(norm2, 1e-300));
      double sq = 0.0;
      for (int i = 0; i < d; ++i) {
        mu[i] *= scale;
        sq += mu[i] * mu[i];
        task.weights_[static_cast<size_t>(c) * d + i] =
            spec.logit_scale * mu[i] / s2;
      }
      task.bias_[c] = -spec.logit_scale * sq / (2.0 * s2);
    }
  } else {
    // Disjoint blocks of informative bits, the remaining bits pure noise.
    for (int c = 0; c < k; ++c) {
      for (int i = 0; i < d; ++i) {
        const bool informative = i / spec.informative_bits == c;
        const double theta = informative ? spec.signal_rate : spec.base_rate;
        task.centers_[static_cast<size_t>(c) * d + i] = theta;
        task.weights_[static_cast<size_t>(c) * d + i] =
            spec.logit_scale * std::log(theta / (1.0 - theta));
        task.bias_[c] += spec.logit_scale * std::log1p(-theta);
      }
    }
  }
  return task;
}

LabeledPoint SyntheticTask::Sample(uint64_t index) const {
  Philox4x64 rng(spec_.seed, kPurposeTaskPoint, index);
  LabeledPoint point;
  point.label = std::min(static_cast<int>(rng.Uniform() * spec_.num_classes),
                         spec_.num_classes - 1);
  point.x.resize(spec_.dims);
  const double* center =
      &centers_[static_cast<size_t>(point.label) * spec_.dims];
  if (spec_.kind == TaskKind::kGaussianMixture) {
    boost::random::normal_distribution<double> normal(0.0, spec_.cluster_std);
    for (int i = 0; i < spec_.dims; ++i) point.x[i] = center[i] + normal(rng);
  } else {
    for (int i = 0; i < spec_.dims; ++i) {
      point.x[i] = rng.Uniform() < center[i] ? 1.0 : 0.0;
    }
  }
  return point;
}

void SyntheticTask::Logits(std::span<const double> x,
                           std::span<double> out) const {
  const int d = spec_.dims;
  for (int c = 0; c < spec_.num_classes; ++c) {
    const double* w = &weights_[static_cast<size_t>(c) * d];
    double z = bias_[c];
    for (int i = 0; i < d; ++i) z += w[i] * x[i];
    out[c] = z;
  }
}

void SyntheticTask::Probabilities(std::span<const double> x,
                                  std::span<double> out) const {
  Logits(x, out);
  Softmax(out);
}

void Softmax(std::span<double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  double total = 0.0;
  for (double& z : logits) {
    z = std::exp(z - top);
    total += z;
  }
  for (double& z : logits) z /= total;
}

}  // namespace robust_cp
