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

#include "robust_cp/poisoning/poisoning.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "absl/strings/str_cat.h"
#include "robust_cp/evasion/evasion.h"

namespace robust_cp {
namespace {

constexpr int kBruteForceMaxPoints = 10;
constexpr int kBruteForceMaxClasses = 4;

// Rank search. In the minimizing direction a changed point moves from s_i to
// alt_i <= s_i and v is reachable iff
//   #{s_i <= v} + min(k, #{alt_i <= v < s_i}) >= order.
// The maximizing direction mirrors this with alt_i >= s_i and the count of
// points at or above v, which must reach n - order + 1.
struct RankResult {
  double q = kAcceptAll;
  std::vector<int> changed;
};

RankResult RankSearch(std::span<const double> s, std::span<const double> alt,
                      int k, int64_t order, PoisonObjective objective) {
  RankResult result;
  const int n = static_cast<int>(s.size());
  if (order <= 0) return result;
  const bool minimize = objective == PoisonObjective::kMinimize;
  const int64_t need = minimize ? order : n - order + 1;

  auto count = [&](double v, int64_t& fixed, int64_t& movable) {
    fixed = 0;
    movable = 0;
    for (int i = 0; i < n; ++i) {
      if (minimize) {
        if (s[i] <= v) {
          ++fixed;
        } else if (alt[i] <= v) {
          ++movable;
        }
      } else {
        if (s[i] >= v) {
          ++fixed;
        } else if (alt[i] >= v) {
          ++movable;
        }
      }
    }
  };
  auto feasible = [&](double v) {
    int64_t fixed, movable;
    count(v, fixed, movable);
    return fixed + std::min<int64_t>(k, movable) >= need;
  };

  std::vector<double> candidates(s.begin(), s.end());
  candidates.insert(candidates.end(), alt.begin(), alt.end());
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()),
                   candidates.end());
  if (!minimize) std::reverse(candidates.begin(), candidates.end());
  // Feasibility is monotone along `candidates`; find the first feasible one.
  const auto it = std::partition_point(
      candidates.begin(), candidates.end(),
      [&](double v) { return !feasible(v); });
  // The unchanged order statistic is always feasible, so `it` is valid.
  const double v = *it;
  result.q = v;

  int64_t fixed, movable;
  count(v, fixed, movable);
  int64_t remaining = std::max<int64_t>(0, need - fixed);
  for (int i = 0; i < n && remaining > 0; ++i) {
    const bool movable_i = minimize ? (s[i] > v && alt[i] <= v)
                                    : (s[i] < v && alt[i] >= v);
    if (movable_i) {
      result.changed.push_back(i);
      --remaining;
    }
  }
  return result;
}

int ArgBest(std::span<const double> row, PoisonObjective objective) {
  const auto it = objective == PoisonObjective::kMinimize
                      ? std::min_element(row.begin(), row.end())
                      : std::max_element(row.begin(), row.end());
  return static_cast<int>(it - row.begin());
}

absl::Status CheckBudget(int k, size_t n, double alpha) {
  if (k < 0 || static_cast<size_t>(k) > n) {
    return absl::InvalidArgumentError(
        absl::StrCat("budget k=", k, " outside [0, ", n, "]"));
  }
  return ValidateAlpha(alpha);
}

}  // namespace

absl::Status ValidateInstance(const FeaturePoisonInstance& inst) {
  const size_t n = inst.scores.size();
  if (n == 0) return absl::InvalidArgumentError("no calibration scores");
  if (inst.lower.size() != n || inst.upper.size() != n) {
    return absl::InvalidArgumentError(
        "scores, lower and upper must have equal length");
  }
  for (size_t i = 0; i < n; ++i) {
    if (!(inst.lower[i] <= inst.scores[i] &&
          inst.scores[i] <= inst.upper[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "point ", i, " violates lower <= score <= upper: ", inst.lower[i],
          " ", inst.scores[i], " ", inst.upper[i]));
    }
  }
  return CheckBudget(inst.k, n, inst.alpha);
}

absl::Status ValidateInstance(const LabelPoisonInstance& inst) {
  const size_t n = inst.score_matrix.size();
  if (n == 0) return absl::InvalidArgumentError("no calibration points");
  if (inst.labels.size() != n) {
    return absl::InvalidArgumentError("one label per calibration point");
  }
  const size_t classes = inst.score_matrix[0].size();
  if (classes == 0) return absl::InvalidArgumentError("no classes");
  for (size_t i = 0; i < n; ++i) {
    if (inst.score_matrix[i].size() != classes) {
      return absl::InvalidArgumentError(
          absl::StrCat("row ", i, " has ", inst.score_matrix[i].size(),
                       " classes, expected ", classes));
    }
    if (inst.labels[i] < 0 || static_cast<size_t>(inst.labels[i]) >= classes) {
      return absl::OutOfRangeError(
          absl::StrCat("label ", inst.labels[i], " of point ", i,
                       " out of range"));
    }
  }
  return CheckBudget(inst.k, n, inst.alpha);
}

absl::StatusOr<ConservativeThreshold> SolveFeaturePoison(
    const FeaturePoisonInstance& inst, PoisonObjective objective) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  const int64_t n = static_cast<int64_t>(inst.scores.size());
  const int64_t order = std::min(ConformalOrderIndex(inst.alpha, n), n);
  const std::vector<double>& alt =
      objective == PoisonObjective::kMinimize ? inst.lower : inst.upper;
  const RankResult rank = RankSearch(inst.scores, alt, inst.k, order,
                                     objective);
  ConservativeThreshold out;
  out.q = rank.q;
  out.order_index = order;
  for (int i : rank.changed) out.witness.push_back({i, alt[i], -1});
  return out;
}

absl::StatusOr<ConservativeThreshold> SolveLabelPoison(
    const LabelPoisonInstance& inst, PoisonObjective objective) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  const int64_t n = static_cast<int64_t>(inst.score_matrix.size());
  const int64_t order = std::min(ConformalOrderIndex(inst.alpha, n), n);
  std::vector<double> scores(n), alt(n);
  std::vector<int> alt_label(n);
  for (int64_t i = 0; i < n; ++i) {
    const std::vector<double>& row = inst.score_matrix[i];
    scores[i] = row[inst.labels[i]];
    alt_label[i] = ArgBest(row, objective);
    alt[i] = row[alt_label[i]];
  }
  const RankResult rank = RankSearch(scores, alt, inst.k, order, objective);
  ConservativeThreshold out;
  out.q = rank.q;
  out.order_index = order;
  for (int i : rank.changed) out.witness.push_back({i, alt[i], alt_label[i]});
  return out;
}

absl::StatusOr<ConservativeThreshold> FeaturePoisonThreshold(
    const FeaturePoisonInstance& inst) {
  return SolveFeaturePoison(inst, PoisonObjective::kMinimize);
}

absl::StatusOr<ConservativeThreshold> LabelPoisonThreshold(
    const LabelPoisonInstance& inst) {
  return SolveLabelPoison(inst, PoisonObjective::kMinimize);
}

absl::StatusOr<double> BruteForceFeaturePoison(
    const FeaturePoisonInstance& inst, PoisonObjective objective) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  const int n = static_cast<int>(inst.scores.size());
  if (n > kBruteForceMaxPoints) {
    return absl::ResourceExhaustedError(
        absl::StrCat("brute force refuses n=", n, " > ", kBruteForceMaxPoints));
  }
  const bool minimize = objective == PoisonObjective::kMinimize;
  const int64_t order = std::min<int64_t>(ConformalOrderIndex(inst.alpha, n), n);
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  std::vector<double> z(n);
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (std::popcount(mask) > inst.k) continue;
    for (int i = 0; i < n; ++i) {
      const bool changed = (mask >> i) & 1u;
      z[i] = !changed ? inst.scores[i]
                      : (minimize ? inst.lower[i] : inst.upper[i]);
    }
    const double q = KthSmallest(z, order);
    best = minimize ? std::min(best, q) : std::max(best, q);
  }
  return best;
}

absl::StatusOr<double> BruteForceLabelPoison(const LabelPoisonInstance& inst,
                                             PoisonObjective objective) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  const int n = static_cast<int>(inst.score_matrix.size());
  const int classes = static_cast<int>(inst.score_matrix[0].size());
  if (n > kBruteForceMaxPoints || classes > kBruteForceMaxClasses) {
    return absl::ResourceExhaustedError(absl::StrCat(
        "brute force refuses n=", n, " classes=", classes, " (limits ",
        kBruteForceMaxPoints, ", ", kBruteForceMaxClasses, ")"));
  }
  const bool minimize = objective == PoisonObjective::kMinimize;
  const int64_t order = std::min<int64_t>(ConformalOrderIndex(inst.alpha, n), n);
  double best = minimize ? std::numeric_limits<double>::infinity()
                         : -std::numeric_limits<double>::infinity();
  std::vector<int> assigned(inst.labels);
  std::vector<double> z(n);
  // Depth-first over points: keep the label, or (budget permitting) switch to
  // any other class.
  std::function<void(int, int)> visit = [&](int i, int budget) {
    if (i == n) {
      for (int j = 0; j < n; ++j) z[j] = inst.score_matrix[j][assigned[j]];
      const double q = KthSmallest(z, order);
      best = minimize ? std::min(best, q) : std::max(best, q);
      return;
    }
    visit(i + 1, budget);
    if (budget == 0) return;
    for (int c = 0; c < classes; ++c) {
      if (c == inst.labels[i]) continue;
      assigned[i] = c;
      visit(i + 1, budget - 1);
    }
    assigned[i] = inst.labels[i];
  };
  visit(0, inst.k);
  return best;
}

absl::StatusOr<double> ReplayFeatureWitness(const FeaturePoisonInstance& inst,
                                            const ConservativeThreshold& t) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  if (static_cast<int>(t.witness.size()) > inst.k) {
    return absl::InternalError("witness exceeds the budget");
  }
  std::vector<double> z = inst.scores;
  for (const PoisonChange& change : t.witness) {
    if (change.point < 0 || change.point >= static_cast<int>(z.size()) ||
        change.value < inst.lower[change.point] ||
        change.value > inst.upper[change.point]) {
      return absl::InternalError(
          absl::StrCat("witness change at point ", change.point,
                       " leaves its allowed interval"));
    }
    z[change.point] = change.value;
  }
  return KthSmallest(z, t.order_index);
}

absl::StatusOr<double> ReplayLabelWitness(const LabelPoisonInstance& inst,
                                          const ConservativeThreshold& t) {
  if (absl::Status s = ValidateInstance(inst); !s.ok()) return s;
  if (static_cast<int>(t.witness.size()) > inst.k) {
    return absl::InternalError("witness exceeds the budget");
  }
  std::vector<int> labels = inst.labels;
  for (const PoisonChange& change : t.witness) {
    if (change.point < 0 || change.point >= static_cast<int>(labels.size()) ||
        change.label < 0 ||
        change.label >=
            static_cast<int>(inst.score_matrix[change.point].size())) {
      return absl::InternalError("witness change out of range");
    }
    labels[change.point] = change.label;
  }
  std::vector<double> z(labels.size());
  for (size_t i = 0; i < labels.size(); ++i) {
    z[i] = inst.score_matrix[i][labels[i]];
  }
  return KthSmallest(z, t.order_index);
}

absl::StatusOr<CorrectedPoisonResult> CorrectedFeaturePoisonThreshold(
    std::span<const double> mc_scores, std::span<const double> corrected_lower,
    int k, double alpha_prime, double eta,
    std::optional<int64_t> hoeffding_denominator) {
  if (absl::Status s = ValidateAlpha(alpha_prime); !s.ok()) return s;
  if (!(eta > 0.0 && eta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("eta=", eta, " outside (0, 1)"));
  }
  if (!(alpha_prime > eta)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "corrected poisoning needs alpha' > eta, got alpha'=", alpha_prime,
        " eta=", eta));
  }
  const int64_t n = static_cast<int64_t>(mc_scores.size());
  if (n == 0 || corrected_lower.size() != mc_scores.size()) {
    return absl::InvalidArgumentError(
        "need one corrected lower bound per calibration score");
  }
  const int64_t denominator = hoeffding_denominator.value_or(n);
  absl::StatusOr<double> epsilon = HoeffdingRadius(denominator, eta);
  if (!epsilon.ok()) return epsilon.status();

  CorrectedPoisonResult out;
  out.epsilon = *epsilon;
  out.alpha = alpha_prime - eta;
  out.ledger = BudgetLedger(eta);
  if (absl::Status s =
          out.ledger.Charge("corrected CDF lower bounds", eta / (2.0 * n), n);
      !s.ok()) {
    return s;
  }
  if (absl::Status s =
          out.ledger.Charge("Hoeffding MC score gap", eta / (2.0 * n), n);
      !s.ok()) {
    return s;
  }
  FeaturePoisonInstance inst;
  inst.scores.assign(mc_scores.begin(), mc_scores.end());
  inst.lower.resize(n);
  inst.upper = inst.scores;
  for (int64_t i = 0; i < n; ++i) {
    inst.lower[i] = std::min(corrected_lower[i] - out.epsilon, mc_scores[i]);
  }
  inst.k = k;
  inst.alpha = out.alpha;
  absl::StatusOr<ConservativeThreshold> threshold =
      FeaturePoisonThreshold(inst);
  if (!threshold.ok()) return threshold.status();
  out.threshold = *std::move(threshold);
  return out;
}

PredictionSet CombinedRobustSet(std::span<const ScoreDistribution> class_dists,
                                double q_poison, const Certifier& observed,
                                BoundKind kind) {
  return TestTimeSet(class_dists, q_poison, observed, kind);
}

}  // namespace robust_cp
