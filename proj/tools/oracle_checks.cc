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

#include "tools/oracle_checks.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "robust_cp/bounds/gaussian_bounds.h"
#include "robust_cp/bounds/region_table.h"
#include "robust_cp/bounds/sparse_bounds.h"
#include "robust_cp/poisoning/poisoning.h"
#include "robust_cp/random/philox.h"
#include "robust_cp/smoothing/score_distribution.h"
#include "tests/oracles.h"

namespace robust_cp {
namespace {

constexpr uint64_t kPurposeGaussian = 1;
constexpr uint64_t kPurposeLp = 2;
constexpr uint64_t kPurposeFeature = 3;
constexpr uint64_t kPurposeLabel = 4;

void Track(OracleCheckResult& result, double error) {
  // NaN must fail the comparison.
  if (!(error <= result.max_error)) result.max_error = error;
}

ScoreDistribution RandomDistribution(RngStream& rng, const BinGrid& grid) {
  std::vector<double> samples(40);
  const double skew = 0.2 + 3.0 * rng.Uniform();
  for (double& s : samples) s = std::pow(rng.Uniform(), skew);
  return *SummarizeSamples(samples, grid);
}

// Anderson combination written out directly from the per-edge LP values.
double OracleCdfBound(const ScoreDistribution& dist,
                      const std::vector<double>& cost,
                      const std::vector<double>& gain, bool upper) {
  const int m = dist.grid.size();
  double value = dist.grid.edge(upper ? m - 1 : m - 2);
  for (int j = 1; j <= m - 2; ++j) {
    // Upper mean bound: smallest attainable CDF at each interior edge.
    const double f = testing::VertexLp(cost, gain, dist.cdf[j], !upper);
    value -= f * (upper ? dist.grid.edge(j + 1) - dist.grid.edge(j)
                        : dist.grid.edge(j) - dist.grid.edge(j - 1));
  }
  return std::clamp(value, 0.0, 1.0);
}

}  // namespace

std::vector<OracleCheckResult> CheckGaussianClosedForms(uint64_t seed,
                                                        int instances) {
  OracleCheckResult closed{"gaussian_mean_closed_form", 0, 0.0, 1e-9};
  OracleCheckResult identity{"gaussian_zero_radius_identity", 0, 0.0, 0.0};
  for (double sigma : {0.12, 0.25, 0.5, 1.0}) {
    const double phi_one = static_cast<double>(testing::PhiHp(1));
    Track(closed, std::abs(GaussianMeanUpper(0.5, sigma, sigma) - phi_one));
    Track(closed,
          std::abs(GaussianMeanLower(0.5, sigma, sigma) - (1.0 - phi_one)));
    closed.instances += 2;
  }
  Philox4x64 rng(seed, kPurposeGaussian, 0);
  const BinGrid grid = BinGrid::Uniform(11);
  for (int i = 0; i < instances; ++i) {
    const double p = 0.001 + 0.998 * rng.Uniform();
    const double sigma = 0.1 + rng.Uniform();
    const double r = 2.0 * sigma * rng.Uniform();
    Track(closed, std::abs(GaussianMeanUpper(p, r, sigma) -
                           testing::ShiftOracle(p, r / sigma)));
    Track(closed, std::abs(GaussianMeanLower(p, r, sigma) -
                           testing::ShiftOracle(p, -r / sigma)));
    closed.instances += 2;

    const ScoreDistribution dist = RandomDistribution(rng, grid);
    Track(identity, std::abs(GaussianMeanUpper(p, 0.0, sigma) - p));
    Track(identity, std::abs(GaussianMeanLower(p, 0.0, sigma) - p));
    Track(identity, std::abs(GaussianCdfUpper(dist, 0.0, sigma) -
                             dist.BinnedMeanUpper()));
    Track(identity, std::abs(GaussianCdfLower(dist, 0.0, sigma) -
                             dist.BinnedMeanLower()));
    identity.instances += 4;
  }
  return {closed, identity};
}

OracleCheckResult CheckRegionTables(int max_total) {
  OracleCheckResult result{"sparse_region_table", 0, 0.0, 1e-12};
  for (auto [p0, p1] : {std::pair{0.2, 0.2}, std::pair{0.01, 0.6}}) {
    for (int r_a = 0; r_a <= max_total; ++r_a) {
      for (int r_d = 0; r_a + r_d <= max_total; ++r_d) {
        ++result.instances;
        absl::StatusOr<RegionTable> table = BuildRegionTable(r_a, r_d, p0, p1);
        const std::vector<testing::OracleRegion> expected =
            testing::EnumerateRegions(r_a, r_d, p0, p1);
        if (!table.ok() || table->size() != static_cast<int>(expected.size())) {
          ++result.errors;
          continue;
        }
        for (int i = 0; i < table->size(); ++i) {
          const Region& region = table->regions[i];
          Track(result, std::abs(region.mass - expected[i].mass));
          Track(result, std::abs(region.mass_tilde - expected[i].mass_tilde));
          Track(result, std::abs(region.ratio - expected[i].ratio) /
                            std::max(1.0, expected[i].ratio));
        }
      }
    }
  }
  return result;
}

std::vector<OracleCheckResult> CheckGreedyAgainstLp(uint64_t seed,
                                                    int instances) {
  OracleCheckResult mean{"sparse_greedy_mean_vs_lp", 0, 0.0, 1e-9};
  OracleCheckResult cdf{"sparse_greedy_cdf_vs_lp", 0, 0.0, 1e-9};
  Philox4x64 rng(seed, kPurposeLp, 0);
  const BinGrid grid = BinGrid::Uniform(6);
  for (int i = 0; i < instances; ++i) {
    const int total = static_cast<int>(rng.Uniform() * 5);
    const int r_a = static_cast<int>(rng.Uniform() * (total + 1));
    const int r_d = total - r_a;
    const double p0 = 0.01 + 0.5 * rng.Uniform();
    const double p1 = 0.01 + 0.8 * rng.Uniform();
    absl::StatusOr<RegionTable> table = BuildRegionTable(r_a, r_d, p0, p1);
    if (!table.ok()) {
      ++mean.errors;
      continue;
    }
    std::vector<double> cost, gain;
    for (const testing::OracleRegion& r :
         testing::EnumerateRegions(r_a, r_d, p0, p1)) {
      cost.push_back(r.mass);
      gain.push_back(r.mass_tilde);
    }
    const double p = rng.Uniform();
    Track(mean, std::abs(SparseMeanUpper(p, *table) -
                         testing::VertexLp(cost, gain, p, true)));
    Track(mean, std::abs(SparseMeanLower(p, *table) -
                         testing::VertexLp(cost, gain, p, false)));
    ++mean.instances;

    const ScoreDistribution dist = RandomDistribution(rng, grid);
    for (int j = 1; j + 1 < grid.size(); ++j) {
      Track(cdf, std::abs(SparseMeanLower(dist.cdf[j], *table) -
                          testing::VertexLp(cost, gain, dist.cdf[j], false)));
    }
    Track(cdf, std::abs(SparseCdfUpper(dist, *table) -
                        OracleCdfBound(dist, cost, gain, true)));
    Track(cdf, std::abs(SparseCdfLower(dist, *table) -
                        OracleCdfBound(dist, cost, gain, false)));
    ++cdf.instances;
  }
  return {mean, cdf};
}

std::vector<OracleCheckResult> CheckPoisoningAgainstBruteForce(uint64_t seed,
                                                               int instances) {
  OracleCheckResult feature{"feature_poisoning_vs_brute_force", 0, 0.0, 0.0};
  OracleCheckResult label{"label_poisoning_vs_brute_force", 0, 0.0, 0.0};
  const auto grid_value = [](RngStream& rng) {
    // Coarse grid so that ties between points occur often.
    return std::floor(rng.Uniform() * 11.0) / 10.0;
  };
  const auto compare = [](OracleCheckResult& result, double solver,
                          double brute) {
    if (solver == brute) return;
    const double error = std::abs(solver - brute);
    Track(result,
          std::isnan(error) ? std::numeric_limits<double>::infinity() : error);
  };

  Philox4x64 frng(seed, kPurposeFeature, 0);
  for (int i = 0; i < instances; ++i) {
    FeaturePoisonInstance inst;
    const int n = 1 + static_cast<int>(frng.Uniform() * 8);
    for (int j = 0; j < n; ++j) {
      const double s = grid_value(frng);
      inst.scores.push_back(s);
      inst.lower.push_back(std::min(s, grid_value(frng)));
      inst.upper.push_back(std::max(s, grid_value(frng)));
    }
    inst.k = static_cast<int>(frng.Uniform() * (std::min(n, 3) + 1));
    inst.alpha = 0.05 + 0.9 * frng.Uniform();
    ++feature.instances;
    for (PoisonObjective objective :
         {PoisonObjective::kMinimize, PoisonObjective::kMaximize}) {
      absl::StatusOr<ConservativeThreshold> solved =
          SolveFeaturePoison(inst, objective);
      absl::StatusOr<double> brute = BruteForceFeaturePoison(inst, objective);
      if (!solved.ok() || !brute.ok()) {
        ++feature.errors;
        continue;
      }
      compare(feature, solved->q, *brute);
      absl::StatusOr<double> replay = ReplayFeatureWitness(inst, *solved);
      if (!replay.ok() || *replay != solved->q) ++feature.errors;
    }
  }

  Philox4x64 lrng(seed, kPurposeLabel, 0);
  for (int i = 0; i < instances; ++i) {
    LabelPoisonInstance inst;
    const int n = 1 + static_cast<int>(lrng.Uniform() * 8);
    const int classes = 2 + static_cast<int>(lrng.Uniform() * 3);
    for (int j = 0; j < n; ++j) {
      std::vector<double> row(classes);
      for (double& v : row) v = grid_value(lrng);
      inst.score_matrix.push_back(std::move(row));
      inst.labels.push_back(static_cast<int>(lrng.Uniform() * classes));
    }
    inst.k = static_cast<int>(lrng.Uniform() * (std::min(n, 3) + 1));
    inst.alpha = 0.05 + 0.9 * lrng.Uniform();
    ++label.instances;
    for (PoisonObjective objective :
         {PoisonObjective::kMinimize, PoisonObjective::kMaximize}) {
      absl::StatusOr<ConservativeThreshold> solved =
          SolveLabelPoison(inst, objective);
      absl::StatusOr<double> brute = BruteForceLabelPoison(inst, objective);
      if (!solved.ok() || !brute.ok()) {
        ++label.errors;
        continue;
      }
      compare(label, solved->q, *brute);
      absl::StatusOr<double> replay = ReplayLabelWitness(inst, *solved);
      if (!replay.ok() || *replay != solved->q) ++label.errors;
    }
  }
  return {feature, label};
}

}  // namespace robust_cp
