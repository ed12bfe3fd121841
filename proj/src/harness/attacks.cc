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

#include "robust_cp/harness/attacks.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "boost/random/normal_distribution.hpp"
#include "robust_cp/core/score_functions.h"

namespace robust_cp {
namespace {

double Score(std::span<const double> probs, int label, ScoreKind kind,
             double u) {
  return kind == ScoreKind::kTps
             ? internal::TpsScoreUnchecked(probs, label)
             : std::clamp(internal::ApsScoreUnchecked(probs, label, u), 0.0,
                          1.0);
}

double Norm(std::span<const double> v) {
  double total = 0.0;
  for (double a : v) total += a * a;
  return std::sqrt(total);
}

}  // namespace

std::string ScoreKindName(ScoreKind kind) {
  return kind == ScoreKind::kTps ? "tps" : "aps";
}

absl::StatusOr<ScoreKind> ParseScoreKind(std::string_view name) {
  if (name == "tps") return ScoreKind::kTps;
  if (name == "aps") return ScoreKind::kAps;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown score '", std::string(name), "' (tps or aps)"));
}

std::vector<double> BaseScores(const SyntheticTask& task,
                               std::span<const double> x, ScoreKind kind,
                               double u) {
  std::vector<double> probs(task.num_classes());
  task.Probabilities(x, probs);
  std::vector<double> scores(task.num_classes());
  for (int c = 0; c < task.num_classes(); ++c) {
    scores[c] = Score(probs, c, kind, u);
  }
  return scores;
}

absl::StatusOr<std::vector<ScoreDistribution>> SmoothClassDistributions(
    const SyntheticTask& task, const SmoothingScheme& scheme,
    std::span<const double> x, ScoreKind kind, int64_t num_samples,
    const BinGrid& grid, RngStream& rng) {
  if (num_samples < 2) {
    return absl::InvalidArgumentError("need at least two noise samples");
  }
  const int k = task.num_classes();
  std::vector<std::vector<double>> samples(k, std::vector<double>(num_samples));
  std::vector<double> noisy(x.size());
  std::vector<double> probs(k);
  for (int64_t j = 0; j < num_samples; ++j) {
    SampleNoisy(scheme, x, rng, noisy);
    const double u = rng.Uniform();
    task.Probabilities(noisy, probs);
    for (int c = 0; c < k; ++c) samples[c][j] = Score(probs, c, kind, u);
  }
  std::vector<ScoreDistribution> out;
  out.reserve(k);
  for (int c = 0; c < k; ++c) {
    absl::StatusOr<ScoreDistribution> dist = SummarizeSamples(samples[c], grid);
    if (!dist.ok()) return dist.status();
    out.push_back(*std::move(dist));
  }
  return out;
}

AttackResult AttackL2(const SyntheticTask& task, std::span<const double> x,
                      int label, double sigma, double radius, AttackGoal goal,
                      const AttackOptions& options, RngStream& rng) {
  const int d = task.dims();
  const int k = task.num_classes();
  const int m = std::max(options.samples, 1);
  std::vector<double> noise(static_cast<size_t>(m) * d);
  boost::random::normal_distribution<double> normal(0.0, sigma);
  for (double& v : noise) v = normal(rng);

  std::vector<double> z(d), probs(k), grad(d);
  // Mean true-label probability at x + delta; fills `grad` with its gradient
  // in delta when requested.
  auto evaluate = [&](std::span<const double> delta, bool with_grad) {
    double total = 0.0;
    if (with_grad) std::fill(grad.begin(), grad.end(), 0.0);
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < d; ++i) {
        z[i] = x[i] + delta[i] + noise[static_cast<size_t>(j) * d + i];
      }
      task.Probabilities(z, probs);
      const double p = probs[label];
      total += p;
      if (!with_grad) continue;
      // d p_y / d z = p_y (w_y - sum_c p_c w_c)
      std::span<const double> wy = task.Weights(label);
      for (int i = 0; i < d; ++i) {
        double mix = 0.0;
        for (int c = 0; c < k; ++c) mix += probs[c] * task.Weights(c)[i];
        grad[i] += p * (wy[i] - mix);
      }
    }
    return total / m;
  };

  AttackResult result;
  std::vector<double> delta(d, 0.0);
  result.clean_objective = evaluate(delta, false);
  result.objective = result.clean_objective;
  std::vector<double> best = delta;
  if (radius > 0.0) {
    const double sign = goal == AttackGoal::kLowerTrueScore ? -1.0 : 1.0;
    const double step = 2.5 * radius / std::max(options.steps, 1);
    for (int t = 0; t < options.steps; ++t) {
      evaluate(delta, true);
      const double norm = Norm(grad);
      if (!(norm > 0.0)) break;
      for (int i = 0; i < d; ++i) delta[i] += sign * step * grad[i] / norm;
      const double length = Norm(delta);
      if (length > radius) {
        for (double& v : delta) v *= radius / length;
      }
      const double value = evaluate(delta, false);
      const bool better = goal == AttackGoal::kLowerTrueScore
                              ? value < result.objective
                              : value > result.objective;
      if (better) {
        result.objective = value;
        best = delta;
      }
    }
  }
  result.x.assign(x.begin(), x.end());
  for (int i = 0; i < d; ++i) result.x[i] += best[i];
  result.l2_distance = Norm(best);
  return result;
}

AttackResult AttackBinary(const SyntheticTask& task, std::span<const double> x,
                          int label, const SparseFlipNoise& noise, int r_a,
                          int r_d, AttackGoal goal,
                          const AttackOptions& options, RngStream& rng) {
  const int d = task.dims();
  const int k = task.num_classes();
  const int m = std::max(options.samples, 1);
  std::vector<double> uniforms(static_cast<size_t>(m) * d);
  for (double& u : uniforms) u = rng.Uniform();
  auto noisy_bit = [&](int j, int i, double bit) {
    const double flip = bit == 0.0 ? noise.p0 : noise.p1;
    const bool flipped = uniforms[static_cast<size_t>(j) * d + i] < flip;
    return flipped ? 1.0 - bit : bit;
  };

  std::vector<double> current(x.begin(), x.end());
  // Per-sample logits at the current input, updated incrementally: a base
  // flip of bit i only moves the noisy bit i.
  std::vector<double> logits(static_cast<size_t>(m) * k);
  std::vector<double> z(d);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) z[i] = noisy_bit(j, i, current[i]);
    task.Logits(
        z, std::span<double>(logits).subspan(static_cast<size_t>(j) * k, k));
  }
  std::vector<double> probs(k);
  auto objective_with_flip = [&](int flip) {
    double total = 0.0;
    for (int j = 0; j < m; ++j) {
      for (int c = 0; c < k; ++c)
        probs[c] = logits[static_cast<size_t>(j) * k + c];
      if (flip >= 0) {
        const double delta = noisy_bit(j, flip, 1.0 - current[flip]) -
                             noisy_bit(j, flip, current[flip]);
        if (delta != 0.0) {
          for (int c = 0; c < k; ++c) probs[c] += delta * task.Weights(c)[flip];
        }
      }
      Softmax(probs);
      total += probs[label];
    }
    return total / m;
  };

  AttackResult result;
  result.clean_objective = objective_with_flip(-1);
  result.objective = result.clean_objective;
  std::vector<bool> touched(d, false);
  while (result.additions < r_a || result.deletions < r_d) {
    int best_flip = -1;
    double best_value = result.objective;
    for (int i = 0; i < d; ++i) {
      if (touched[i]) continue;
      const bool addition = current[i] == 0.0;
      if (addition ? result.additions >= r_a : result.deletions >= r_d) {
        continue;
      }
      const double value = objective_with_flip(i);
      const bool better = goal == AttackGoal::kLowerTrueScore
                              ? value < best_value
                              : value > best_value;
      if (better) {
        best_value = value;
        best_flip = i;
      }
    }
    if (best_flip < 0) break;
    for (int j = 0; j < m; ++j) {
      const double delta = noisy_bit(j, best_flip, 1.0 - current[best_flip]) -
                           noisy_bit(j, best_flip, current[best_flip]);
      for (int c = 0; c < k; ++c) {
        logits[static_cast<size_t>(j) * k + c] +=
            delta * task.Weights(c)[best_flip];
      }
    }
    if (current[best_flip] == 0.0) {
      ++result.additions;
    } else {
      ++result.deletions;
    }
    current[best_flip] = 1.0 - current[best_flip];
    touched[best_flip] = true;
    result.objective = best_value;
  }
  result.x = std::move(current);
  return result;
}

}  // namespace robust_cp
