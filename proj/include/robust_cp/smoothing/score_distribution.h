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

#ifndef ROBUST_CP_SMOOTHING_SCORE_DISTRIBUTION_H_
#define ROBUST_CP_SMOOTHING_SCORE_DISTRIBUTION_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "robust_cp/random/philox.h"
#include "robust_cp/smoothing/noise.h"

namespace robust_cp {

// Bin edges b_1 = 0 <= b_2 <= ... <= b_m = 1 with b_1 < b_2 and
// b_{m-1} < b_m. Copies share the edge storage.
class BinGrid {
 public:
  static absl::StatusOr<BinGrid> Create(std::vector<double> edges);
  // `num_edges` uniformly spaced edges on [0, 1].
  static BinGrid Uniform(int num_edges = 51);

  int size() const { return static_cast<int>(edges_->size()); }
  // Zero-based: edge(0) == 0, edge(size() - 1) == 1.
  double edge(int j) const { return (*edges_)[j]; }
  std::span<const double> edges() const { return *edges_; }

  friend bool operator==(const BinGrid& a, const BinGrid& b) {
    return a.edges_ == b.edges_ || *a.edges_ == *b.edges_;
  }

 private:
  explicit BinGrid(std::shared_ptr<const std::vector<double>> edges)
      : edges_(std::move(edges)) {}

  std::shared_ptr<const std::vector<double>> edges_;
};

// Monte-Carlo summary of the smoothed score of one (input, class) pair.
//
// cdf[j] = fraction of samples <= edge(j) for j = 0..m-1. Only the interior
// entries j = 1..m-2 enter the bounds; the end entries are kept so indices
// line up with the grid.
struct ScoreDistribution {
  int64_t sample_count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased sample variance
  BinGrid grid = BinGrid::Uniform();
  std::vector<double> cdf;

  // Mean bounds implied by the binned CDF alone (Anderson at zero radius).
  double BinnedMeanUpper() const;
  double BinnedMeanLower() const;
};

absl::Status ValidateDistribution(const ScoreDistribution& dist);

// Summarizes raw samples, each of which must lie in [0, 1]. Requires at least
// one sample; the variance is 0 when there is only one.
absl::StatusOr<ScoreDistribution> SummarizeSamples(
    std::span<const double> samples, const BinGrid& grid);

// Builds a distribution from precomputed statistics (e.g. a loaded artifact).
absl::StatusOr<ScoreDistribution> DistributionFromCdf(int64_t sample_count,
                                                      double mean,
                                                      double variance,
                                                      const BinGrid& grid,
                                                      std::vector<double> cdf);

// Maps a noisy input to a score in [0, 1]. `tie_break` is a fresh uniform
// draw per noise sample for randomized scores such as APS; deterministic
// oracles ignore it.
using ScoreOracle =
    std::function<double(std::span<const double> noisy_input, double tie_break)>;

// Draws `num_samples` noisy copies of `x` from `rng` and summarizes the oracle
// outputs. An output outside [0, 1] is an internal error.
absl::StatusOr<ScoreDistribution> EstimateDistribution(
    const ScoreOracle& oracle, std::span<const double> x,
    const SmoothingScheme& scheme, int64_t num_samples, const BinGrid& grid,
    RngStream& rng);

}  // namespace robust_cp

#endif  // ROBUST_CP_SMOOTHING_SCORE_DISTRIBUTION_H_
