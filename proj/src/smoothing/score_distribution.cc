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

#include "robust_cp/smoothing/score_distribution.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"

namespace robust_cp {

absl::StatusOr<BinGrid> BinGrid::Create(std::vector<double> edges) {
  const size_t m = edges.size();
  if (m < 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("bin grid needs at least 3 edges, got ", m));
  }
  if (edges.front() != 0.0 || edges.back() != 1.0) {
    return absl::InvalidArgumentError("bin grid must start at 0 and end at 1");
  }
  for (size_t j = 1; j < m; ++j) {
    if (!(edges[j] >= edges[j - 1])) {
      return absl::InvalidArgumentError(
          absl::StrCat("bin edges decrease at index ", j));
    }
  }
  if (!(edges[0] < edges[1]) || !(edges[m - 2] < edges[m - 1])) {
    return absl::InvalidArgumentError("outer bins of the grid must be nonempty");
  }
  return BinGrid(
      std::make_shared<const std::vector<double>>(std::move(edges)));
}

BinGrid BinGrid::Uniform(int num_edges) {
  num_edges = std::max(num_edges, 3);
  std::vector<double> edges(num_edges);
  for (int j = 0; j < num_edges; ++j) {
    edges[j] = static_cast<double>(j) / (num_edges - 1);
  }
  edges.back() = 1.0;
  return BinGrid(
      std::make_shared<const std::vector<double>>(std::move(edges)));
}

double ScoreDistribution::BinnedMeanUpper() const {
  const int m = grid.size();
  double value = grid.edge(m - 1);
  for (int j = 1; j <= m - 2; ++j) {
    value -= cdf[j] * (grid.edge(j + 1) - grid.edge(j));
  }
  return std::clamp(value, 0.0, 1.0);
}

double ScoreDistribution::BinnedMeanLower() const {
  const int m = grid.size();
  double value = grid.edge(m - 2);
  for (int j = 1; j <= m - 2; ++j) {
    value -= cdf[j] * (grid.edge(j) - grid.edge(j - 1));
  }
  return std::clamp(value, 0.0, 1.0);
}

absl::Status ValidateDistribution(const ScoreDistribution& dist) {
  if (dist.sample_count < 1) {
    return absl::InvalidArgumentError("sample_count must be positive");
  }
  if (!(dist.mean >= 0.0 && dist.mean <= 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("mean ", dist.mean, " outside [0, 1]"));
  }
  if (!(dist.variance >= 0.0) || !std::isfinite(dist.variance)) {
    return absl::InvalidArgumentError("variance must be finite and >= 0");
  }
  if (static_cast<int>(dist.cdf.size()) != dist.grid.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("cdf has ", dist.cdf.size(), " entries for ",
                     dist.grid.size(), " edges"));
  }
  for (size_t j = 0; j < dist.cdf.size(); ++j) {
    if (!(dist.cdf[j] >= 0.0 && dist.cdf[j] <= 1.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("cdf[", j, "] = ", dist.cdf[j], " outside [0, 1]"));
    }
    if (j > 0 && dist.cdf[j] < dist.cdf[j - 1]) {
      return absl::InvalidArgumentError(
          absl::StrCat("cdf decreases at edge ", j));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<ScoreDistribution> SummarizeSamples(
    std::span<const double> samples, const BinGrid& grid) {
  if (samples.empty()) {
    return absl::InvalidArgumentError("no samples to summarize");
  }
  const int m = grid.size();
  std::vector<int64_t> at_or_below(m, 0);
  // Neumaier-compensated sum so constant samples reproduce their value.
  double sum = 0.0;
  double compensation = 0.0;
  for (const double s : samples) {
    if (!(s >= 0.0 && s <= 1.0)) {
      return absl::InternalError(
          absl::StrCat("score ", s, " outside [0, 1]"));
    }
    const double t = sum + s;
    compensation += std::abs(sum) >= std::abs(s) ? (sum - t) + s : (s - t) + sum;
    sum = t;
    // First edge >= s; the sample counts toward that edge and all above.
    const auto it = std::lower_bound(grid.edges().begin(), grid.edges().end(),
                                     s);
    ++at_or_below[it - grid.edges().begin()];
  }
  const double count = static_cast<double>(samples.size());
  ScoreDistribution dist;
  dist.sample_count = static_cast<int64_t>(samples.size());
  dist.grid = grid;
  dist.mean = std::clamp((sum + compensation) / count, 0.0, 1.0);
  if (samples.size() > 1) {
    double squares = 0.0;
    for (const double s : samples) squares += (s - dist.mean) * (s - dist.mean);
    dist.variance = squares / (count - 1.0);
  }
  dist.cdf.resize(m);
  int64_t running = 0;
  for (int j = 0; j < m; ++j) {
    running += at_or_below[j];
    dist.cdf[j] = static_cast<double>(running) / count;
  }
  return dist;
}

absl::StatusOr<ScoreDistribution> DistributionFromCdf(int64_t sample_count,
                                                      double mean,
                                                      double variance,
                                                      const BinGrid& grid,
                                                      std::vector<double> cdf) {
  ScoreDistribution dist;
  dist.sample_count = sample_count;
  dist.mean = mean;
  dist.variance = variance;
  dist.grid = grid;
  dist.cdf = std::move(cdf);
  if (absl::Status s = ValidateDistribution(dist); !s.ok()) return s;
  return dist;
}

absl::StatusOr<ScoreDistribution> EstimateDistribution(
    const ScoreOracle& oracle, std::span<const double> x,
    const SmoothingScheme& scheme, int64_t num_samples, const BinGrid& grid,
    RngStream& rng) {
  if (num_samples < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat("need at least 2 Monte-Carlo samples, got ", num_samples));
  }
  if (absl::Status s = ValidateScheme(scheme); !s.ok()) return s;
  if (std::holds_alternative<SparseFlipNoise>(scheme)) {
    if (absl::Status s = ValidateBinary(x); !s.ok()) return s;
  }
  std::vector<double> noisy(x.size());
  std::vector<double> samples(num_samples);
  for (int64_t i = 0; i < num_samples; ++i) {
    SampleNoisy(scheme, x, rng, noisy);
    samples[i] = oracle(noisy, rng.Uniform());
  }
  return SummarizeSamples(samples, grid);
}

}  // namespace robust_cp
