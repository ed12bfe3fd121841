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

// Synthetic classification tasks with closed-form linear-softmax classifiers.
//
// gaussian-mixture: x ~ N(mu_y, s^2 I) with class means on a sphere; the
// classifier is the Bayes posterior scaled by `logit_scale`.
// binary-linear: x_i ~ Bernoulli(theta_{y,i}) with a few informative bits per
// class; the classifier is the naive-Bayes posterior scaled by `logit_scale`.

#ifndef ROBUST_CP_HARNESS_SYNTHETIC_TASK_H_
#define ROBUST_CP_HARNESS_SYNTHETIC_TASK_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace robust_cp {

enum class TaskKind { kGaussianMixture, kBinaryLinear };

std::string TaskKindName(TaskKind kind);
absl::StatusOr<TaskKind> ParseTaskKind(std::string_view name);

struct TaskSpec {
  TaskKind kind = TaskKind::kGaussianMixture;
  int num_classes = 4;
  int dims = 8;
  uint64_t seed = 0;
  double logit_scale = 1.0;
  // gaussian-mixture
  double separation = 1.0;   // norm of each class mean
  double cluster_std = 0.5;  // s
  // binary-linear
  double base_rate = 0.1;
  double signal_rate = 0.5;
  int informative_bits = 4;  // per class
};

absl::Status ValidateTaskSpec(const TaskSpec& spec);

struct LabeledPoint {
  std::vector<double> x;
  int label = 0;
};

class SyntheticTask {
 public:
  static absl::StatusOr<SyntheticTask> Create(const TaskSpec& spec);

  const TaskSpec& spec() const { return spec_; }
  int num_classes() const { return spec_.num_classes; }
  int dims() const { return spec_.dims; }
  bool binary() const { return spec_.kind == TaskKind::kBinaryLinear; }

  // Point `index` of the task's infinite i.i.d. stream.
  LabeledPoint Sample(uint64_t index) const;

  // logits = W x + b.
  void Logits(std::span<const double> x, std::span<double> out) const;
  // Softmax of the logits.
  void Probabilities(std::span<const double> x, std::span<double> out) const;

  // Row c of W.
  std::span<const double> Weights(int c) const {
    return std::span<const double>(weights_).subspan(
        static_cast<size_t>(c) * spec_.dims, spec_.dims);
  }
  double Bias(int c) const { return bias_[c]; }

 private:
  explicit SyntheticTask(TaskSpec spec) : spec_(spec) {}

  TaskSpec spec_;
  std::vector<double> centers_;  // [class][dim]; means or Bernoulli rates
  std::vector<double> weights_;  // [class][dim]
  std::vector<double> bias_;
};

// Stable in-place softmax.
void Softmax(std::span<double> logits);

}  // namespace robust_cp

#endif  // ROBUST_CP_HARNESS_SYNTHETIC_TASK_H_
