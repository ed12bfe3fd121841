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

#include "robust_cp/harness/experiment.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>
#include <tuple>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "absl/strings/str_split.h"
#include "json.hpp"
#include "robust_cp/bounds/threat_model.h"
#include "robust_cp/core/conformal.h"
#include "robust_cp/correction/confidence.h"
#include "robust_cp/evasion/evasion.h"
#include "robust_cp/io/files.h"
#include "robust_cp/poisoning/poisoning.h"
#include "robust_cp/random/philox.h"

namespace robust_cp {
namespace {

constexpr uint64_t kPurposeBase = 0x62617365;      // "base"
constexpr uint64_t kPurposeSmooth = 0x736d6f6f;    // "smoo"
constexpr uint64_t kPurposeAttack = 0x61747461;    // "atta"
constexpr uint64_t kPurposeAttacked = 0x61747464;  // "attd"
constexpr uint64_t kPurposePoison = 0x706f6973;    // "pois"
constexpr uint64_t kPurposeTrial = 0x7472696c;     // "tril"
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSlack = 1e-12;

struct Setting {
  std::string name;
  double radius = 0.0;  // reported value
  ThreatModel model;
  bool trivial = false;
};

struct SettingRecord {
  std::vector<ScoreDistribution> attacked;
  std::vector<double> clean_upper_mean, clean_upper_cdf;
  std::vector<double> attacked_upper_mean, attacked_upper_cdf;
  double lower_mean = 0.0;
  double lower_cdf = 0.0;
  double corrected_lower_cdf = kNaN;
};

struct PoisonRecord {
  double up_mean = 0.0;
  double clean_lower = 0.0;
  double up_lower = 0.0;
  double clean_corrected = kNaN;
  double up_corrected = kNaN;
};

struct PoolPoint {
  int label = 0;
  std::vector<double> base_scores;
  std::vector<ScoreDistribution> clean;
  std::vector<SettingRecord> settings;
  PoisonRecord poison;
  std::vector<std::string> violations;
};

SmoothingScheme SchemeFor(const ExperimentConfig& config) {
  if (config.task.kind == TaskKind::kBinaryLinear) return config.sparse;
  return GaussianNoise{config.sigma};
}

std::string BinaryName(const BinaryRadius& r) {
  return absl::StrCat("ra=", r.r_a, ";rd=", r.r_d);
}

std::vector<Setting> SettingsFor(const ExperimentConfig& config) {
  std::vector<Setting> out;
  if (config.task.kind == TaskKind::kBinaryLinear) {
    for (const BinaryRadius& r : config.binary_radii) {
      out.push_back({BinaryName(r), static_cast<double>(r.r_a + r.r_d),
                     BinaryBall{r.r_a, r.r_d}, r.r_a + r.r_d == 0});
    }
  } else {
    for (double r : config.radii) {
      out.push_back({absl::StrCat("r=", FormatDouble(r)), r,
                     L2Ball{r * config.sigma}, r == 0.0});
    }
  }
  return out;
}

// Attack toward `goal` inside `model` around `x`.
AttackResult RunAttack(const ExperimentConfig& config,
                       const SyntheticTask& task, std::span<const double> x,
                       int label, const ThreatModel& model, AttackGoal goal,
                       RngStream& rng) {
  if (const auto* ball = std::get_if<BinaryBall>(&model)) {
    return AttackBinary(task, x, label, config.sparse, ball->r_a, ball->r_d,
                        goal, config.attack, rng);
  }
  return AttackL2(task, x, label, config.sigma, std::get<L2Ball>(model).r, goal,
                  config.attack, rng);
}

void CheckAttack(const AttackResult& attack, const ThreatModel& model,
                 AttackGoal goal, std::string_view where,
                 std::vector<std::string>& violations) {
  if (const auto* ball = std::get_if<BinaryBall>(&model)) {
    if (attack.additions > ball->r_a || attack.deletions > ball->r_d) {
      violations.push_back(
          absl::StrCat(std::string(where), ": attack exceeds flip budget"));
    }
  } else if (attack.l2_distance >
             std::get<L2Ball>(model).r * (1.0 + 1e-9) + 1e-12) {
    violations.push_back(
        absl::StrCat(std::string(where), ": attack leaves the L2 ball"));
  }
  const bool worse = goal == AttackGoal::kLowerTrueScore
                         ? attack.objective > attack.clean_objective
                         : attack.objective < attack.clean_objective;
  if (worse) {
    violations.push_back(absl::StrCat(
        std::string(where), ": attack objective worse than the clean input"));
  }
}

absl::StatusOr<PoolPoint> ComputePoolPoint(
    const ExperimentConfig& config, const SyntheticTask& task,
    const std::vector<Setting>& settings,
    const std::vector<Certifier>& clean_view,
    const std::vector<Certifier>& observed_view,
    const std::optional<Certifier>& poison_view,
    const std::optional<ThreatModel>& poison_model, const BinGrid& grid,
    int index) {
  const SmoothingScheme scheme = SchemeFor(config);
  const LabeledPoint sample = task.Sample(index);
  PoolPoint point;
  point.label = sample.label;
  Philox4x64 base_rng(config.seed, kPurposeBase, index);
  point.base_scores =
      BaseScores(task, sample.x, config.score, base_rng.Uniform());
  Philox4x64 smooth_rng(config.seed, kPurposeSmooth, index);
  absl::StatusOr<std::vector<ScoreDistribution>> clean =
      SmoothClassDistributions(task, scheme, sample.x, config.score,
                               config.samples, grid, smooth_rng);
  if (!clean.ok()) return clean.status();
  point.clean = *std::move(clean);
  const int k = task.num_classes();
  const ScoreDistribution& truth = point.clean[point.label];

  for (size_t s = 0; s < settings.size(); ++s) {
    SettingRecord record;
    if (settings[s].trivial) {
      record.attacked = point.clean;
    } else {
      Philox4x64 attack_rng(config.seed, kPurposeAttack + (s << 32), index);
      const AttackResult attack =
          RunAttack(config, task, sample.x, point.label, settings[s].model,
                    AttackGoal::kLowerTrueScore, attack_rng);
      CheckAttack(attack, settings[s].model, AttackGoal::kLowerTrueScore,
                  absl::StrCat("pool point ", index, " ", settings[s].name),
                  point.violations);
      Philox4x64 attacked_rng(config.seed, kPurposeAttacked + (s << 32), index);
      absl::StatusOr<std::vector<ScoreDistribution>> attacked =
          SmoothClassDistributions(task, scheme, attack.x, config.score,
                                   config.samples, grid, attacked_rng);
      if (!attacked.ok()) return attacked.status();
      record.attacked = *std::move(attacked);
    }
    const Certifier& lower = clean_view[s];
    const Certifier& upper = observed_view[s];
    record.lower_mean =
        lower.Bound(truth, BoundKind::kMean, BoundDirection::kLower);
    record.lower_cdf =
        lower.Bound(truth, BoundKind::kCdf, BoundDirection::kLower);
    if (config.eta > 0.0) {
      absl::StatusOr<CorrectedDistribution> corrected = CorrectDistribution(
          truth, config.eta / (2.0 * config.calibration_size),
          CorrectionFlavor::kCdfDkw);
      if (!corrected.ok()) return corrected.status();
      record.corrected_lower_cdf = CorrectedBound(
          *corrected, lower, BoundKind::kCdf, BoundDirection::kLower);
    }
    for (int c = 0; c < k; ++c) {
      record.clean_upper_mean.push_back(upper.Bound(
          point.clean[c], BoundKind::kMean, BoundDirection::kUpper));
      record.clean_upper_cdf.push_back(
          upper.Bound(point.clean[c], BoundKind::kCdf, BoundDirection::kUpper));
      record.attacked_upper_mean.push_back(upper.Bound(
          record.attacked[c], BoundKind::kMean, BoundDirection::kUpper));
      record.attacked_upper_cdf.push_back(upper.Bound(
          record.attacked[c], BoundKind::kCdf, BoundDirection::kUpper));
    }
    point.settings.push_back(std::move(record));
  }

  if (poison_view.has_value()) {
    Philox4x64 attack_rng(config.seed, kPurposePoison, index);
    const AttackResult attack =
        RunAttack(config, task, sample.x, point.label, *poison_model,
                  AttackGoal::kRaiseTrueScore, attack_rng);
    CheckAttack(attack, *poison_model, AttackGoal::kRaiseTrueScore,
                absl::StrCat("pool point ", index, " poisoning"),
                point.violations);
    Philox4x64 up_rng(config.seed, kPurposePoison + (1ull << 32), index);
    absl::StatusOr<std::vector<ScoreDistribution>> up =
        SmoothClassDistributions(task, scheme, attack.x, config.score,
                                 config.samples, grid, up_rng);
    if (!up.ok()) return up.status();
    const ScoreDistribution& up_truth = (*up)[point.label];
    PoisonRecord& poison = point.poison;
    poison.up_mean = up_truth.mean;
    poison.clean_lower =
        poison_view->Bound(truth, BoundKind::kCdf, BoundDirection::kLower);
    poison.up_lower =
        poison_view->Bound(up_truth, BoundKind::kCdf, BoundDirection::kLower);
    if (config.eta > 0.0) {
      const double eta_part = config.eta / (2.0 * config.calibration_size);
      for (auto [dist, out] : {std::pair{&truth, &poison.clean_corrected},
                               std::pair{&up_truth, &poison.up_corrected}}) {
        absl::StatusOr<CorrectedDistribution> corrected =
            CorrectDistribution(*dist, eta_part, CorrectionFlavor::kCdfDkw);
        if (!corrected.ok()) return corrected.status();
        *out = CorrectedBound(*corrected, *poison_view, BoundKind::kCdf,
                              BoundDirection::kLower);
      }
    }
  }
  return point;
}

class TrialBuilder {
 public:
  TrialBuilder(TrialResult& trial, std::span<const int> labels, int num_classes)
      : trial_(trial), labels_(labels), num_classes_(num_classes) {}

  absl::Status Add(std::string method, std::string setting, std::string input,
                   double alpha, double radius, int k,
                   std::span<const PredictionSet> sets, double threshold) {
    absl::StatusOr<MetricsReport> metrics =
        Evaluate(sets, labels_, num_classes_);
    if (!metrics.ok()) return metrics.status();
    if (!(metrics->empirical_coverage >= 0.0 &&
          metrics->empirical_coverage <= 1.0)) {
      Violation(absl::StrCat(method, " ", setting, ": coverage out of range"));
    }
    trial_.methods.push_back({std::move(method), std::move(setting),
                              std::move(input), alpha, radius, k,
                              *std::move(metrics), threshold});
    return absl::OkStatus();
  }

  void Violation(std::string message) {
    trial_.invariant_violations.push_back(
        absl::StrCat("trial ", trial_.trial, ": ", message));
  }

 private:
  TrialResult& trial_;
  std::span<const int> labels_;
  int num_classes_;
};

std::vector<PredictionSet> SetsFrom(
    const std::vector<std::vector<double>>& scores, double threshold) {
  std::vector<PredictionSet> sets;
  sets.reserve(scores.size());
  for (const std::vector<double>& row : scores) {
    sets.push_back(MakePredictionSet(row, threshold));
  }
  return sets;
}

absl::Status RunEvasion(const ExperimentConfig& config,
                        const std::vector<Setting>& settings,
                        const std::vector<PoolPoint>& pool,
                        std::span<const int> cal, std::span<const int> test,
                        TrialBuilder& builder, TrialResult& trial) {
  const int n = static_cast<int>(cal.size());
  for (size_t s = 0; s < settings.size(); ++s) {
    const Setting& setting = settings[s];
    std::vector<double> means(n), lowers_mean(n), lowers_cdf(n);
    CalibrationTable table;
    for (int i = 0; i < n; ++i) {
      const PoolPoint& p = pool[cal[i]];
      means[i] = p.clean[p.label].mean;
      lowers_mean[i] = p.settings[s].lower_mean;
      lowers_cdf[i] = p.settings[s].lower_cdf;
      CalibrationRow row;
      row.smooth_mean = means[i];
      row.lower = lowers_cdf[i];
      row.corrected_lower = p.settings[s].corrected_lower_cdf;
      table.rows.push_back(std::move(row));
    }
    absl::StatusOr<double> q = ConformalQuantile(means, config.alpha);
    if (!q.ok()) return q.status();
    absl::StatusOr<double> q_cas = ConformalQuantile(lowers_cdf, config.alpha);
    if (!q_cas.ok()) return q_cas.status();
    if (*q_cas > *q + kSlack) {
      builder.Violation(
          absl::StrCat(setting.name, ": CAS threshold above vanilla"));
    }
    absl::StatusOr<double> beta_rscp =
        VanillaWorstCaseCoverage(lowers_mean, *q);
    absl::StatusOr<double> beta_cas = VanillaWorstCaseCoverage(lowers_cdf, *q);
    if (!beta_rscp.ok()) return beta_rscp.status();
    if (!beta_cas.ok()) return beta_cas.status();
    trial.scalars[absl::StrCat("beta_rscp@", setting.name)] = *beta_rscp;
    trial.scalars[absl::StrCat("beta_cas@", setting.name)] = *beta_cas;

    std::optional<CorrectedCalibration> corrected;
    if (config.eta > 0.0) {
      absl::StatusOr<CorrectedCalibration> c =
          CorrectedCalibrate(table, config.alpha, config.eta);
      if (!c.ok()) return c.status();
      corrected = *std::move(c);
      if (corrected->threshold > *q_cas + kSlack) {
        builder.Violation(absl::StrCat(
            setting.name, ": corrected threshold above uncorrected"));
      }
      trial.scalars[absl::StrCat("corrected_gap@", setting.name)] =
          *q_cas - corrected->threshold;
    }

    for (const bool attacked : {false, true}) {
      const std::string input = attacked ? "attacked" : "clean";
      std::vector<std::vector<double>> plain, upper_mean, upper_cdf;
      for (int t : test) {
        const PoolPoint& p = pool[t];
        const SettingRecord& r = p.settings[s];
        const std::vector<ScoreDistribution>& dists =
            attacked ? r.attacked : p.clean;
        std::vector<double> row;
        for (const ScoreDistribution& d : dists) row.push_back(d.mean);
        plain.push_back(std::move(row));
        upper_mean.push_back(attacked ? r.attacked_upper_mean
                                      : r.clean_upper_mean);
        upper_cdf.push_back(attacked ? r.attacked_upper_cdf
                                     : r.clean_upper_cdf);
      }
      const auto add = [&](std::string method,
                           const std::vector<std::vector<double>>& scores,
                           double threshold) {
        return builder.Add(std::move(method), setting.name, input, config.alpha,
                           setting.radius, -1, SetsFrom(scores, threshold),
                           threshold);
      };
      if (absl::Status st = add("vanilla", plain, *q); !st.ok()) return st;
      if (absl::Status st = add("rscp", upper_mean, *q); !st.ok()) return st;
      if (absl::Status st = add("cas", plain, *q_cas); !st.ok()) return st;
      if (absl::Status st = add("cas_test_time", upper_cdf, *q); !st.ok()) {
        return st;
      }
      if (corrected.has_value()) {
        std::vector<PredictionSet> sets;
        double consumed = 0.0;
        for (int t : test) {
          const PoolPoint& p = pool[t];
          BudgetLedger ledger(0.0);
          absl::StatusOr<PredictionSet> set = CorrectedSet(
              attacked ? p.settings[s].attacked : p.clean, *corrected, &ledger);
          if (!set.ok()) return set.status();
          consumed = std::max(consumed, ledger.consumed());
          sets.push_back(*std::move(set));
        }
        if (consumed > config.eta * (1.0 + kSlack)) {
          builder.Violation(absl::StrCat(setting.name, ": ledger exceeds eta"));
        }
        trial.scalars[absl::StrCat("ledger_consumed@", setting.name)] =
            consumed;
        if (absl::Status st =
                builder.Add("cas_corrected", setting.name, input, config.alpha,
                            setting.radius, -1, sets, corrected->threshold);
            !st.ok()) {
          return st;
        }
      }
    }

    if (s == 0) {
      std::vector<std::vector<double>> plain, upper_mean;
      for (int t : test) {
        const PoolPoint& p = pool[t];
        std::vector<double> row;
        for (const ScoreDistribution& d : p.clean) row.push_back(d.mean);
        plain.push_back(std::move(row));
        upper_mean.push_back(p.settings[s].clean_upper_mean);
      }
      for (double a : config.size_alphas) {
        absl::StatusOr<double> qa = ConformalQuantile(means, a);
        absl::StatusOr<double> qa_cas = ConformalQuantile(lowers_cdf, a);
        if (!qa.ok()) return qa.status();
        if (!qa_cas.ok()) return qa_cas.status();
        for (auto [method, scores, threshold] :
             {std::tuple{"vanilla", &plain, *qa},
              std::tuple{"rscp", &upper_mean, *qa},
              std::tuple{"cas", &plain, *qa_cas}}) {
          if (std::abs(a - config.alpha) < kSlack) continue;
          if (absl::Status st =
                  builder.Add(method, setting.name, "clean", a, setting.radius,
                              -1, SetsFrom(*scores, threshold), threshold);
              !st.ok()) {
            return st;
          }
        }
      }
    }
  }
  return absl::OkStatus();
}

absl::Status RunLabelPoisoning(const ExperimentConfig& config,
                               const std::vector<PoolPoint>& pool,
                               std::span<const int> cal,
                               std::span<const int> test,
                               TrialBuilder& builder) {
  LabelPoisonInstance clean;
  for (int i : cal) {
    clean.score_matrix.push_back(pool[i].base_scores);
    clean.labels.push_back(pool[i].label);
  }
  clean.alpha = config.alpha;
  std::vector<double> true_scores;
  for (int i : cal) true_scores.push_back(pool[i].base_scores[pool[i].label]);
  absl::StatusOr<double> clean_q = ConformalQuantile(true_scores, config.alpha);
  if (!clean_q.ok()) return clean_q.status();
  std::vector<std::vector<double>> test_scores;
  for (int t : test) test_scores.push_back(pool[t].base_scores);

  for (int k : config.label_poison_k) {
    const std::string setting = absl::StrCat("k=", k);
    LabelPoisonInstance inst = clean;
    inst.k = k;
    absl::StatusOr<ConservativeThreshold> attack =
        SolveLabelPoison(inst, PoisonObjective::kMaximize);
    if (!attack.ok()) return attack.status();
    absl::StatusOr<double> replay = ReplayLabelWitness(inst, *attack);
    if (!replay.ok()) return replay.status();
    if (*replay != attack->q) builder.Violation(setting + ": witness replay");
    LabelPoisonInstance poisoned = inst;
    for (const PoisonChange& change : attack->witness) {
      poisoned.labels[change.point] = change.label;
    }
    std::vector<double> poisoned_scores;
    for (size_t i = 0; i < cal.size(); ++i) {
      poisoned_scores.push_back(poisoned.score_matrix[i][poisoned.labels[i]]);
    }
    absl::StatusOr<double> vanilla_q =
        ConformalQuantile(poisoned_scores, config.alpha);
    if (!vanilla_q.ok()) return vanilla_q.status();
    absl::StatusOr<ConservativeThreshold> robust =
        LabelPoisonThreshold(poisoned);
    if (!robust.ok()) return robust.status();
    if (*vanilla_q < *clean_q) {
      builder.Violation(setting + ": label attack lowered the quantile");
    }
    if (robust->q > *clean_q) {
      builder.Violation(setting + ": robust label threshold above clean");
    }
    if (absl::Status st =
            builder.Add("label_vanilla", setting, "clean", config.alpha, 0.0, k,
                        SetsFrom(test_scores, *vanilla_q), *vanilla_q);
        !st.ok()) {
      return st;
    }
    if (absl::Status st =
            builder.Add("label_robust", setting, "clean", config.alpha, 0.0, k,
                        SetsFrom(test_scores, robust->q), robust->q);
        !st.ok()) {
      return st;
    }
  }
  return absl::OkStatus();
}

absl::Status RunFeaturePoisoning(const ExperimentConfig& config,
                                 const std::vector<Setting>& settings,
                                 const std::vector<PoolPoint>& pool,
                                 std::span<const int> cal,
                                 std::span<const int> test,
                                 TrialBuilder& builder, TrialResult& trial) {
  const int n = static_cast<int>(cal.size());
  FeaturePoisonInstance attack_inst;
  for (int i : cal) {
    const PoolPoint& p = pool[i];
    const double s = p.clean[p.label].mean;
    attack_inst.scores.push_back(s);
    attack_inst.lower.push_back(s);
    attack_inst.upper.push_back(std::max(s, p.poison.up_mean));
  }
  attack_inst.alpha = config.alpha;
  absl::StatusOr<double> clean_q =
      ConformalQuantile(attack_inst.scores, config.alpha);
  if (!clean_q.ok()) return clean_q.status();
  std::vector<std::vector<double>> test_means, test_attacked_upper;
  for (int t : test) {
    std::vector<double> row;
    for (const ScoreDistribution& d : pool[t].clean) row.push_back(d.mean);
    test_means.push_back(std::move(row));
    if (!settings.empty()) {
      test_attacked_upper.push_back(pool[t].settings[0].attacked_upper_cdf);
    }
  }

  for (int k : config.feature_poison_k) {
    const std::string setting = absl::StrCat("k=", k);
    attack_inst.k = k;
    absl::StatusOr<ConservativeThreshold> attack =
        SolveFeaturePoison(attack_inst, PoisonObjective::kMaximize);
    if (!attack.ok()) return attack.status();
    std::vector<bool> poisoned(n, false);
    for (const PoisonChange& change : attack->witness) {
      poisoned[change.point] = true;
    }
    FeaturePoisonInstance robust_inst;
    std::vector<double> corrected_lowers;
    for (int i = 0; i < n; ++i) {
      const PoisonRecord& r = pool[cal[i]].poison;
      const double mean =
          poisoned[i] ? attack_inst.upper[i] : attack_inst.scores[i];
      const double lower = poisoned[i] ? r.up_lower : r.clean_lower;
      robust_inst.scores.push_back(mean);
      robust_inst.lower.push_back(std::min(lower, mean));
      robust_inst.upper.push_back(mean);
      corrected_lowers.push_back(poisoned[i] ? r.up_corrected
                                             : r.clean_corrected);
    }
    robust_inst.k = k;
    robust_inst.alpha = config.alpha;
    absl::StatusOr<double> vanilla_q =
        ConformalQuantile(robust_inst.scores, config.alpha);
    if (!vanilla_q.ok()) return vanilla_q.status();
    if (*vanilla_q < *clean_q) {
      builder.Violation(setting + ": feature attack lowered the quantile");
    }
    absl::StatusOr<ConservativeThreshold> robust =
        FeaturePoisonThreshold(robust_inst);
    if (!robust.ok()) return robust.status();

    if (absl::Status st =
            builder.Add("feature_vanilla", setting, "clean", config.alpha,
                        config.feature_poison_radius, k,
                        SetsFrom(test_means, *vanilla_q), *vanilla_q);
        !st.ok()) {
      return st;
    }
    if (absl::Status st =
            builder.Add("feature_robust", setting, "clean", config.alpha,
                        config.feature_poison_radius, k,
                        SetsFrom(test_means, robust->q), robust->q);
        !st.ok()) {
      return st;
    }
    if (config.eta > 0.0) {
      absl::StatusOr<CorrectedPoisonResult> corrected =
          CorrectedFeaturePoisonThreshold(robust_inst.scores, corrected_lowers,
                                          k, config.alpha, config.eta);
      if (!corrected.ok()) return corrected.status();
      if (corrected->threshold.q > robust->q + kSlack) {
        builder.Violation(setting +
                          ": corrected poisoning threshold above uncorrected");
      }
      if (corrected->ledger.consumed() > config.eta * (1.0 + kSlack)) {
        builder.Violation(setting + ": poisoning ledger exceeds eta");
      }
      trial.scalars[absl::StrCat("feature_corrected_gap@", setting)] =
          robust->q - corrected->threshold.q;
      trial.scalars[absl::StrCat("feature_ledger_consumed@", setting)] =
          corrected->ledger.consumed();
      if (absl::Status st =
              builder.Add("feature_corrected", setting, "clean", config.alpha,
                          config.feature_poison_radius, k,
                          SetsFrom(test_means, corrected->threshold.q),
                          corrected->threshold.q);
          !st.ok()) {
        return st;
      }
    }
    if (!settings.empty()) {
      if (absl::Status st = builder.Add(
              "combined", absl::StrCat(setting, ";", settings[0].name),
              "attacked", config.alpha, settings[0].radius, k,
              SetsFrom(test_attacked_upper, robust->q), robust->q);
          !st.ok()) {
        return st;
      }
    }
  }
  return absl::OkStatus();
}

TrialResult RunTrial(const ExperimentConfig& config,
                     const std::vector<Setting>& settings,
                     const std::vector<PoolPoint>& pool, int num_classes,
                     int t) {
  TrialResult trial;
  trial.trial = t;
  trial.seed = DeriveSeed(config.seed, kPurposeTrial, t);
  Philox4x64 rng(trial.seed, kPurposeTrial, 0);
  // Partial Fisher-Yates: the first n + m entries form the split.
  std::vector<int> order(pool.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  const int n = config.calibration_size;
  const int m = config.test_size;
  for (int i = 0; i < n + m; ++i) {
    const int remaining = static_cast<int>(order.size()) - i;
    const int j = i + std::min(static_cast<int>(rng.Uniform() * remaining),
                               remaining - 1);
    std::swap(order[i], order[j]);
  }
  std::span<const int> cal(order.data(), n);
  std::span<const int> test(order.data() + n, m);
  std::vector<int> labels;
  for (int i : test) labels.push_back(pool[i].label);
  TrialBuilder builder(trial, labels, num_classes);

  absl::Status status =
      RunEvasion(config, settings, pool, cal, test, builder, trial);
  if (status.ok()) {
    status = RunLabelPoisoning(config, pool, cal, test, builder);
  }
  if (status.ok() && !config.feature_poison_k.empty()) {
    status =
        RunFeaturePoisoning(config, settings, pool, cal, test, builder, trial);
  }
  if (!status.ok()) {
    trial.ok = false;
    trial.error = status.ToString();
    trial.methods.clear();
    trial.scalars.clear();
  }
  return trial;
}

double Mean(const std::vector<double>& v) {
  double total = 0.0;
  for (double x : v) total += x;
  return v.empty() ? 0.0 : total / v.size();
}

double StdDev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double mean = Mean(v);
  double total = 0.0;
  for (double x : v) total += (x - mean) * (x - mean);
  return std::sqrt(total / (v.size() - 1));
}

void Aggregate(ExperimentResult& result) {
  struct Accumulator {
    AggregateRow row;
    std::vector<double> coverage, size, singleton, threshold;
  };
  std::map<std::tuple<std::string, std::string, std::string, double>,
           Accumulator>
      groups;
  std::map<std::string, std::vector<double>> scalars;
  for (const TrialResult& trial : result.trials) {
    if (!trial.ok) continue;
    for (const MethodResult& m : trial.methods) {
      Accumulator& acc = groups[{m.method, m.setting, m.input, m.alpha}];
      acc.row.method = m.method;
      acc.row.setting = m.setting;
      acc.row.input = m.input;
      acc.row.alpha = m.alpha;
      acc.row.radius = m.radius;
      acc.row.k = m.k;
      acc.coverage.push_back(m.metrics.empirical_coverage);
      acc.size.push_back(m.metrics.avg_set_size);
      acc.singleton.push_back(m.metrics.singleton_hit_ratio);
      acc.threshold.push_back(m.threshold);
    }
    for (const auto& [name, value] : trial.scalars) {
      scalars[name].push_back(value);
    }
  }
  for (auto& [key, acc] : groups) {
    AggregateRow row = acc.row;
    row.trials = static_cast<int>(acc.coverage.size());
    row.coverage_mean = Mean(acc.coverage);
    row.coverage_std = StdDev(acc.coverage);
    row.size_mean = Mean(acc.size);
    row.size_std = StdDev(acc.size);
    row.singleton_hit_mean = Mean(acc.singleton);
    row.threshold_mean = Mean(acc.threshold);
    result.aggregate.push_back(std::move(row));
  }
  for (const auto& [name, values] : scalars) {
    result.scalars.push_back({name, static_cast<int>(values.size()),
                              Mean(values), StdDev(values),
                              *std::min_element(values.begin(), values.end()),
                              *std::max_element(values.begin(), values.end())});
  }
}

absl::StatusOr<BinaryRadius> ParseBinaryRadius(std::string_view text) {
  std::vector<std::string> parts = absl::StrSplit(std::string(text), ':');
  BinaryRadius r;
  if (parts.size() == 1 && absl::SimpleAtoi(parts[0], &r.r_a)) {
    r.r_d = r.r_a;
    return r;
  }
  if (parts.size() == 2 && absl::SimpleAtoi(parts[0], &r.r_a) &&
      absl::SimpleAtoi(parts[1], &r.r_d)) {
    return r;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("binary radius '", std::string(text), "' is not r_a:r_d"));
}

std::string FormatBinaryRadius(const BinaryRadius& r) {
  return absl::StrCat(r.r_a, ":", r.r_d);
}

template <typename T>
std::string JoinNumbers(const std::vector<T>& values) {
  std::vector<std::string> parts;
  for (const T& v : values) {
    if constexpr (std::is_floating_point_v<T>) {
      parts.push_back(FormatDouble(v));
    } else {
      parts.push_back(absl::StrCat(v));
    }
  }
  return absl::StrJoin(parts, ", ");
}

nlohmann::json JsonNumber(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

}  // namespace

absl::Status ValidateExperimentConfig(const ExperimentConfig& config) {
  if (absl::Status s = ValidateTaskSpec(config.task); !s.ok()) return s;
  if (absl::Status s = ValidateAlpha(config.alpha); !s.ok()) return s;
  if (config.trials < 1)
    return absl::InvalidArgumentError("trials must be >= 1");
  if (config.calibration_size < 1 || config.test_size < 1) {
    return absl::InvalidArgumentError(
        "calibration_size and test_size must be >= 1");
  }
  if (config.pool_size < config.calibration_size + config.test_size) {
    return absl::InvalidArgumentError(absl::StrCat(
        "pool_size=", config.pool_size, " smaller than calibration_size + ",
        "test_size=", config.calibration_size + config.test_size));
  }
  if (config.samples < 2)
    return absl::InvalidArgumentError("samples must be >= 2");
  if (config.bins < 2) return absl::InvalidArgumentError("bins must be >= 2");
  if (config.attack.samples < 1 || config.attack.steps < 0) {
    return absl::InvalidArgumentError(
        "attack_samples must be >= 1 and attack_steps >= 0");
  }
  if (absl::Status s = ValidateScheme(GaussianNoise{config.sigma}); !s.ok()) {
    return s;
  }
  if (absl::Status s = ValidateScheme(config.sparse); !s.ok()) return s;
  for (double r : config.radii) {
    if (!(r >= 0.0) || !std::isfinite(r)) {
      return absl::InvalidArgumentError("radii must be finite and >= 0");
    }
  }
  for (const BinaryRadius& r : config.binary_radii) {
    if (r.r_a < 0 || r.r_d < 0) {
      return absl::InvalidArgumentError("binary radii must be >= 0");
    }
  }
  if (!(config.feature_poison_radius >= 0.0) ||
      config.feature_poison_binary.r_a < 0 ||
      config.feature_poison_binary.r_d < 0) {
    return absl::InvalidArgumentError("feature poisoning radius must be >= 0");
  }
  if (!(config.eta >= 0.0 && config.eta < 1.0)) {
    return absl::InvalidArgumentError("eta must lie in [0, 1)");
  }
  if (config.eta > 0.0 && !(config.eta < config.alpha)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "eta=", config.eta, " must be smaller than alpha=", config.alpha));
  }
  for (double a : config.size_alphas) {
    if (absl::Status s = ValidateAlpha(a); !s.ok()) return s;
  }
  for (const std::vector<int>* ks :
       {&config.label_poison_k, &config.feature_poison_k}) {
    for (int k : *ks) {
      if (k < 0 || k > config.calibration_size) {
        return absl::InvalidArgumentError(
            absl::StrCat("poisoning budget k=", k, " outside [0, ",
                         config.calibration_size, "]"));
      }
    }
  }
  if (config.workers < 1)
    return absl::InvalidArgumentError("workers must be >= 1");
  return absl::OkStatus();
}

absl::StatusOr<ExperimentConfig> ExperimentConfigFromKeyValue(
    const KeyValueConfig& kv) {
  static const std::set<std::string> kKnown = {"task",
                                               "classes",
                                               "dims",
                                               "logit_scale",
                                               "separation",
                                               "cluster_std",
                                               "base_rate",
                                               "signal_rate",
                                               "informative_bits",
                                               "seed",
                                               "trials",
                                               "pool_size",
                                               "calibration_size",
                                               "test_size",
                                               "alpha",
                                               "score",
                                               "sigma",
                                               "p0",
                                               "p1",
                                               "radii",
                                               "binary_radii",
                                               "samples",
                                               "bins",
                                               "attack_samples",
                                               "attack_steps",
                                               "eta",
                                               "size_alphas",
                                               "label_poison_k",
                                               "feature_poison_k",
                                               "feature_poison_radius",
                                               "feature_poison_binary"};
  if (absl::Status s = kv.CheckKnownKeys(kKnown); !s.ok()) return s;
  ExperimentConfig c;
  const ExperimentConfig d;
  absl::Status status;
  auto take = [&status](auto result, auto& out) {
    if (!status.ok()) return;
    if (!result.ok()) {
      status = result.status();
      return;
    }
    out = static_cast<std::remove_reference_t<decltype(out)>>(*result);
  };
  std::string task_name, score_name;
  take(kv.GetString("task", TaskKindName(d.task.kind)), task_name);
  take(kv.GetInt("classes", d.task.num_classes), c.task.num_classes);
  take(kv.GetInt("dims", d.task.dims), c.task.dims);
  take(kv.GetDouble("logit_scale", d.task.logit_scale), c.task.logit_scale);
  take(kv.GetDouble("separation", d.task.separation), c.task.separation);
  take(kv.GetDouble("cluster_std", d.task.cluster_std), c.task.cluster_std);
  take(kv.GetDouble("base_rate", d.task.base_rate), c.task.base_rate);
  take(kv.GetDouble("signal_rate", d.task.signal_rate), c.task.signal_rate);
  take(kv.GetInt("informative_bits", d.task.informative_bits),
       c.task.informative_bits);
  int64_t seed = 0;
  take(kv.GetInt("seed", 0), seed);
  take(kv.GetInt("trials", d.trials), c.trials);
  take(kv.GetInt("pool_size", d.pool_size), c.pool_size);
  take(kv.GetInt("calibration_size", d.calibration_size), c.calibration_size);
  take(kv.GetInt("test_size", d.test_size), c.test_size);
  take(kv.GetDouble("alpha", d.alpha), c.alpha);
  take(kv.GetString("score", ScoreKindName(d.score)), score_name);
  take(kv.GetDouble("sigma", d.sigma), c.sigma);
  take(kv.GetDouble("p0", d.sparse.p0), c.sparse.p0);
  take(kv.GetDouble("p1", d.sparse.p1), c.sparse.p1);
  take(kv.GetDoubleList("radii", d.radii), c.radii);
  take(kv.GetInt("samples", d.samples), c.samples);
  take(kv.GetInt("bins", d.bins), c.bins);
  take(kv.GetInt("attack_samples", d.attack.samples), c.attack.samples);
  take(kv.GetInt("attack_steps", d.attack.steps), c.attack.steps);
  take(kv.GetDouble("eta", d.eta), c.eta);
  take(kv.GetDoubleList("size_alphas", d.size_alphas), c.size_alphas);
  std::vector<int64_t> label_k, feature_k;
  take(kv.GetIntList("label_poison_k", {}), label_k);
  take(kv.GetIntList("feature_poison_k", {}), feature_k);
  take(kv.GetDouble("feature_poison_radius", d.feature_poison_radius),
       c.feature_poison_radius);
  if (!status.ok()) return status;
  if (seed < 0) return absl::InvalidArgumentError("seed must be >= 0");
  c.seed = static_cast<uint64_t>(seed);
  c.task.seed = c.seed;
  c.label_poison_k.assign(label_k.begin(), label_k.end());
  c.feature_poison_k.assign(feature_k.begin(), feature_k.end());
  absl::StatusOr<TaskKind> kind = ParseTaskKind(task_name);
  if (!kind.ok()) return kind.status();
  c.task.kind = *kind;
  absl::StatusOr<ScoreKind> score = ParseScoreKind(score_name);
  if (!score.ok()) return score.status();
  c.score = *score;
  if (kv.Has("binary_radii")) {
    c.binary_radii.clear();
    for (const std::string& part : kv.GetStringList("binary_radii")) {
      absl::StatusOr<BinaryRadius> r = ParseBinaryRadius(part);
      if (!r.ok()) return r.status();
      c.binary_radii.push_back(*r);
    }
  }
  if (std::optional<std::string> v = kv.Get("feature_poison_binary")) {
    absl::StatusOr<BinaryRadius> r = ParseBinaryRadius(*v);
    if (!r.ok()) return r.status();
    c.feature_poison_binary = *r;
  }
  if (absl::Status s = ValidateExperimentConfig(c); !s.ok()) return s;
  return c;
}

KeyValueConfig ExperimentConfigToKeyValue(const ExperimentConfig& c) {
  KeyValueConfig kv;
  kv.Set("task", TaskKindName(c.task.kind));
  kv.Set("classes", absl::StrCat(c.task.num_classes));
  kv.Set("dims", absl::StrCat(c.task.dims));
  kv.Set("logit_scale", FormatDouble(c.task.logit_scale));
  kv.Set("separation", FormatDouble(c.task.separation));
  kv.Set("cluster_std", FormatDouble(c.task.cluster_std));
  kv.Set("base_rate", FormatDouble(c.task.base_rate));
  kv.Set("signal_rate", FormatDouble(c.task.signal_rate));
  kv.Set("informative_bits", absl::StrCat(c.task.informative_bits));
  kv.Set("seed", absl::StrCat(c.seed));
  kv.Set("trials", absl::StrCat(c.trials));
  kv.Set("pool_size", absl::StrCat(c.pool_size));
  kv.Set("calibration_size", absl::StrCat(c.calibration_size));
  kv.Set("test_size", absl::StrCat(c.test_size));
  kv.Set("alpha", FormatDouble(c.alpha));
  kv.Set("score", ScoreKindName(c.score));
  kv.Set("sigma", FormatDouble(c.sigma));
  kv.Set("p0", FormatDouble(c.sparse.p0));
  kv.Set("p1", FormatDouble(c.sparse.p1));
  kv.Set("radii", JoinNumbers(c.radii));
  std::vector<std::string> binary;
  for (const BinaryRadius& r : c.binary_radii) {
    binary.push_back(FormatBinaryRadius(r));
  }
  kv.Set("binary_radii", absl::StrJoin(binary, ", "));
  kv.Set("samples", absl::StrCat(c.samples));
  kv.Set("bins", absl::StrCat(c.bins));
  kv.Set("attack_samples", absl::StrCat(c.attack.samples));
  kv.Set("attack_steps", absl::StrCat(c.attack.steps));
  kv.Set("eta", FormatDouble(c.eta));
  kv.Set("size_alphas", JoinNumbers(c.size_alphas));
  kv.Set("label_poison_k", JoinNumbers(c.label_poison_k));
  kv.Set("feature_poison_k", JoinNumbers(c.feature_poison_k));
  kv.Set("feature_poison_radius", FormatDouble(c.feature_poison_radius));
  kv.Set("feature_poison_binary", FormatBinaryRadius(c.feature_poison_binary));
  return kv;
}

const AggregateRow* ExperimentResult::Find(std::string_view method,
                                           std::string_view setting,
                                           std::string_view input,
                                           double alpha) const {
  for (const AggregateRow& row : aggregate) {
    if (row.method == method && row.setting == setting && row.input == input &&
        std::abs(row.alpha - alpha) < kSlack) {
      return &row;
    }
  }
  return nullptr;
}

void ParallelFor(int n, int workers, const std::function<void(int)>& fn) {
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> threads;
  for (int w = 0; w < workers; ++w) {
    threads.emplace_back([&] {
      for (int i = next++; i < n; i = next++) fn(i);
    });
  }
  for (std::thread& t : threads) t.join();
}

absl::StatusOr<ExperimentResult> RunExperiment(const ExperimentConfig& config) {
  if (absl::Status s = ValidateExperimentConfig(config); !s.ok()) return s;
  absl::StatusOr<SyntheticTask> task = SyntheticTask::Create(config.task);
  if (!task.ok()) return task.status();
  const BinGrid grid = BinGrid::Uniform(config.bins);
  const SmoothingScheme scheme = SchemeFor(config);
  const std::vector<Setting> settings = SettingsFor(config);
  std::vector<Certifier> clean_view, observed_view;
  for (const Setting& s : settings) {
    absl::StatusOr<Certifier> clean =
        Certifier::Create(scheme, s.model, InputView::kClean);
    if (!clean.ok()) return clean.status();
    absl::StatusOr<Certifier> observed =
        Certifier::Create(scheme, s.model, InputView::kObserved);
    if (!observed.ok()) return observed.status();
    clean_view.push_back(*std::move(clean));
    observed_view.push_back(*std::move(observed));
  }
  std::optional<Certifier> poison_view;
  std::optional<ThreatModel> poison_model;
  if (!config.feature_poison_k.empty()) {
    poison_model =
        task->binary()
            ? ThreatModel(BinaryBall{config.feature_poison_binary.r_a,
                                     config.feature_poison_binary.r_d})
            : ThreatModel(L2Ball{config.feature_poison_radius * config.sigma});
    absl::StatusOr<Certifier> c =
        Certifier::Create(scheme, *poison_model, InputView::kObserved);
    if (!c.ok()) return c.status();
    poison_view = *std::move(c);
  }

  std::vector<absl::StatusOr<PoolPoint>> computed(
      config.pool_size, absl::UnknownError("not computed"));
  ParallelFor(config.pool_size, config.workers, [&](int i) {
    computed[i] =
        ComputePoolPoint(config, *task, settings, clean_view, observed_view,
                         poison_view, poison_model, grid, i);
  });
  ExperimentResult result;
  result.config = config;
  std::vector<PoolPoint> pool;
  pool.reserve(config.pool_size);
  for (int i = 0; i < config.pool_size; ++i) {
    if (!computed[i].ok()) {
      return absl::Status(
          computed[i].status().code(),
          absl::StrCat("pool point ", i, ": ", computed[i].status().message()));
    }
    for (const std::string& v : computed[i]->violations) {
      result.invariant_violations.push_back(v);
    }
    pool.push_back(*std::move(computed[i]));
  }

  result.trials.resize(config.trials);
  ParallelFor(config.trials, config.workers, [&](int t) {
    result.trials[t] = RunTrial(config, settings, pool, task->num_classes(), t);
  });
  for (const TrialResult& trial : result.trials) {
    for (const std::string& v : trial.invariant_violations) {
      result.invariant_violations.push_back(v);
    }
  }
  Aggregate(result);
  return result;
}

absl::Status WriteExperimentOutputs(const ExperimentResult& result,
                                    const std::string& dir) {
  std::string trials;
  for (const TrialResult& trial : result.trials) {
    nlohmann::json line;
    line["trial"] = trial.trial;
    line["seed"] = trial.seed;
    line["ok"] = trial.ok;
    if (!trial.ok) line["error"] = trial.error;
    nlohmann::json methods = nlohmann::json::array();
    for (const MethodResult& m : trial.methods) {
      methods.push_back({{"method", m.method},
                         {"setting", m.setting},
                         {"input", m.input},
                         {"alpha", m.alpha},
                         {"radius", m.radius},
                         {"k", m.k},
                         {"num_points", m.metrics.num_points},
                         {"coverage", m.metrics.empirical_coverage},
                         {"avg_set_size", m.metrics.avg_set_size},
                         {"singleton_hit_ratio", m.metrics.singleton_hit_ratio},
                         {"set_size_histogram", m.metrics.set_size_histogram},
                         {"threshold", JsonNumber(m.threshold)}});
    }
    line["methods"] = std::move(methods);
    nlohmann::json scalars = nlohmann::json::object();
    for (const auto& [name, value] : trial.scalars) {
      scalars[name] = JsonNumber(value);
    }
    line["scalars"] = std::move(scalars);
    line["invariant_violations"] = trial.invariant_violations;
    absl::StrAppend(&trials, line.dump(), "\n");
  }

  std::string aggregate =
      "method,setting,input,alpha,radius,k,trials,coverage_mean,coverage_std,"
      "size_mean,size_std,singleton_hit_mean,threshold_mean\n";
  std::string coverage_vs_r =
      "method,input,radius,coverage_mean,coverage_std\n";
  std::string size_vs_r = "method,input,radius,size_mean,size_std\n";
  std::string size_vs_alpha = "method,alpha,size_mean,size_std\n";
  const std::set<std::string> evasion_methods = {
      "vanilla", "rscp", "cas", "cas_test_time", "cas_corrected"};
  const std::vector<Setting> settings = SettingsFor(result.config);
  for (const AggregateRow& row : result.aggregate) {
    absl::StrAppend(
        &aggregate, row.method, ",", row.setting, ",", row.input, ",",
        FormatDouble(row.alpha), ",", FormatDouble(row.radius), ",", row.k, ",",
        row.trials, ",", FormatDouble(row.coverage_mean), ",",
        FormatDouble(row.coverage_std), ",", FormatDouble(row.size_mean), ",",
        FormatDouble(row.size_std), ",", FormatDouble(row.singleton_hit_mean),
        ",", FormatDouble(row.threshold_mean), "\n");
    if (!evasion_methods.contains(row.method)) continue;
    const bool nominal = std::abs(row.alpha - result.config.alpha) < kSlack;
    if (nominal) {
      absl::StrAppend(&coverage_vs_r, row.method, ",", row.input, ",",
                      FormatDouble(row.radius), ",",
                      FormatDouble(row.coverage_mean), ",",
                      FormatDouble(row.coverage_std), "\n");
      absl::StrAppend(&size_vs_r, row.method, ",", row.input, ",",
                      FormatDouble(row.radius), ",",
                      FormatDouble(row.size_mean), ",",
                      FormatDouble(row.size_std), "\n");
    }
    if (!settings.empty() && row.setting == settings[0].name &&
        row.input == "clean" && row.method != "cas_test_time" &&
        row.method != "cas_corrected") {
      absl::StrAppend(&size_vs_alpha, row.method, ",", FormatDouble(row.alpha),
                      ",", FormatDouble(row.size_mean), ",",
                      FormatDouble(row.size_std), "\n");
    }
  }
  std::string scalars = "name,trials,mean,std,min,max\n";
  for (const ScalarRow& row : result.scalars) {
    absl::StrAppend(&scalars, row.name, ",", row.trials, ",",
                    FormatDouble(row.mean), ",", FormatDouble(row.std), ",",
                    FormatDouble(row.min), ",", FormatDouble(row.max), "\n");
  }
  std::string invariants;
  for (const std::string& v : result.invariant_violations) {
    absl::StrAppend(&invariants, v, "\n");
  }

  const std::vector<std::pair<std::string, const std::string*>> files = {
      {"trials.jsonl", &trials},
      {"aggregate.csv", &aggregate},
      {"aggregate_scalars.csv", &scalars},
      {"invariant_violations.txt", &invariants},
      {"plotdata/coverage_vs_r.csv", &coverage_vs_r},
      {"plotdata/size_vs_r.csv", &size_vs_r},
      {"plotdata/size_vs_alpha.csv", &size_vs_alpha}};
  for (const auto& [name, content] : files) {
    if (absl::Status s =
            WriteFileAtomic(absl::StrCat(dir, "/", name), *content);
        !s.ok()) {
      return s;
    }
  }
  return absl::OkStatus();
}

}  // namespace robust_cp
