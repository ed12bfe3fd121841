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

#include "tools/commands.h"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "robust_cp/core/metrics.h"
#include "robust_cp/evasion/evasion.h"
#include "robust_cp/harness/experiment.h"
#include "robust_cp/io/artifact.h"
#include "robust_cp/io/files.h"
#include "robust_cp/io/formats.h"
#include "robust_cp/poisoning/poisoning.h"
#include "tools/oracle_checks.h"

namespace robust_cp::cli {
namespace {

using nlohmann::json;

json Number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

std::string Path(const std::string& dir, std::string_view name) {
  return absl::StrCat(dir, "/", std::string(name));
}

// Unwraps a StatusOr into `out` or returns its status from the caller.
#define RCP_ASSIGN_OR_RETURN(lhs, expr)         \
  auto lhs##_or = (expr);                       \
  if (!lhs##_or.ok()) return lhs##_or.status(); \
  auto lhs = *std::move(lhs##_or)

absl::StatusOr<std::vector<std::vector<ScoreDistribution>>> LoadDistributions(
    const std::string& path, const BinGrid& grid) {
  RCP_ASSIGN_OR_RETURN(contents, ReadFile(path));
  absl::StatusOr<ScoreTensor> tensor = ParseScoreTensor(contents);
  if (!tensor.ok()) {
    return absl::Status(tensor.status().code(),
                        absl::StrCat(path, ": ", tensor.status().message()));
  }
  if (tensor->num_points > 0 && tensor->num_samples < 2) {
    return absl::InvalidArgumentError(
        absl::StrCat(path, ": at least 2 samples per point are required"));
  }
  return DistributionsFromTensor(*tensor, grid);
}

absl::StatusOr<std::vector<int>> LoadLabels(const std::string& path,
                                            size_t num_points,
                                            size_t num_classes) {
  RCP_ASSIGN_OR_RETURN(contents, ReadFile(path));
  absl::StatusOr<std::vector<int>> labels = ParseLabelsCsv(contents);
  if (!labels.ok()) {
    return absl::Status(labels.status().code(),
                        absl::StrCat(path, ": ", labels.status().message()));
  }
  if (labels->size() != num_points) {
    return absl::InvalidArgumentError(absl::StrCat(path, ": ", labels->size(),
                                                   " labels for ", num_points,
                                                   " scored points"));
  }
  for (int label : *labels) {
    if (label >= static_cast<int>(num_classes)) {
      return absl::InvalidArgumentError(absl::StrCat(
          path, ": label ", label, " outside ", num_classes, " classes"));
    }
  }
  return labels;
}

absl::StatusOr<EvasionConfig> EvasionFromConfig(const KeyValueConfig& c) {
  EvasionConfig config;
  RCP_ASSIGN_OR_RETURN(scheme, c.GetString("scheme", ""));
  RCP_ASSIGN_OR_RETURN(threat, c.GetString("threat", ""));
  if (scheme == "gaussian") {
    RCP_ASSIGN_OR_RETURN(sigma, c.GetDouble("sigma", 0));
    config.scheme = GaussianNoise{sigma};
  } else if (scheme == "sparse") {
    RCP_ASSIGN_OR_RETURN(p0, c.GetDouble("p0", 0));
    RCP_ASSIGN_OR_RETURN(p1, c.GetDouble("p1", 0));
    config.scheme = SparseFlipNoise{p0, p1};
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("scheme '", scheme, "' is not gaussian or sparse"));
  }
  if (threat == "l2") {
    RCP_ASSIGN_OR_RETURN(radius, c.GetDouble("radius", 0));
    config.model = L2Ball{radius};
  } else if (threat == "binary") {
    RCP_ASSIGN_OR_RETURN(r_a, c.GetInt("r_a", 0));
    RCP_ASSIGN_OR_RETURN(r_d, c.GetInt("r_d", 0));
    config.model = BinaryBall{static_cast<int>(r_a), static_cast<int>(r_d)};
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("threat '", threat, "' is not l2 or binary"));
  }
  if (absl::Status s = CheckCompatible(config.scheme, config.model); !s.ok()) {
    return absl::FailedPreconditionError(s.message());
  }
  RCP_ASSIGN_OR_RETURN(mode, c.GetString("mode", ""));
  if (mode != "calibration_time" && mode != "test_time") {
    return absl::InvalidArgumentError(
        absl::StrCat("mode '", mode, "' is not calibration_time or test_time"));
  }
  config.mode = mode == "calibration_time" ? EvasionMode::kCalibrationTime
                                           : EvasionMode::kTestTime;
  RCP_ASSIGN_OR_RETURN(kind, c.GetString("bound_kind", ""));
  if (kind != "mean" && kind != "cdf") {
    return absl::InvalidArgumentError(
        absl::StrCat("bound_kind '", kind, "' is not mean or cdf"));
  }
  config.bound_kind = kind == "mean" ? BoundKind::kMean : BoundKind::kCdf;
  RCP_ASSIGN_OR_RETURN(eta, c.GetDouble("eta", 0));
  if (eta < 0.0 || eta >= 1.0) {
    return absl::InvalidArgumentError("eta must lie in [0, 1)");
  }
  if (eta > 0.0) config.eta = eta;
  return config;
}

absl::Status WriteResolved(const KeyValueConfig& config,
                           const std::string& out) {
  return WriteFileAtomic(
      Path(out, "resolved_config.txt"),
      "# robust_cp resolved config v1\n" + config.Serialize());
}

absl::Status RunCalibrate(const KeyValueConfig& c, const std::string& out,
                          int /*workers*/) {
  RCP_ASSIGN_OR_RETURN(evasion, EvasionFromConfig(c));
  RCP_ASSIGN_OR_RETURN(alpha, c.GetDouble("alpha", 0));
  if (absl::Status s = ValidateAlpha(alpha); !s.ok()) return s;
  if (evasion.eta.has_value() && !(*evasion.eta < alpha)) {
    return absl::FailedPreconditionError(absl::StrCat(
        "eta=", *evasion.eta, " must be smaller than alpha=", alpha));
  }
  RCP_ASSIGN_OR_RETURN(bins, c.GetInt("bins", 0));
  if (bins < 2 || bins > 100000) {
    return absl::InvalidArgumentError("bins must lie in [2, 100000]");
  }
  const BinGrid grid = BinGrid::Uniform(static_cast<int>(bins));
  RCP_ASSIGN_OR_RETURN(scores_path, c.GetString("scores", ""));
  RCP_ASSIGN_OR_RETURN(labels_path, c.GetString("labels", ""));
  RCP_ASSIGN_OR_RETURN(dists, LoadDistributions(scores_path, grid));
  const size_t classes = dists.empty() ? 0 : dists[0].size();
  RCP_ASSIGN_OR_RETURN(labels, LoadLabels(labels_path, dists.size(), classes));
  std::vector<ScoreDistribution> truth;
  for (size_t i = 0; i < dists.size(); ++i)
    truth.push_back(dists[i][labels[i]]);
  RCP_ASSIGN_OR_RETURN(artifact,
                       BuildCalibrationArtifact(truth, alpha, evasion));
  if (artifact.q_calibration > artifact.q_alpha + 1e-12) {
    return absl::InternalError(
        "calibration-time threshold exceeds the vanilla quantile");
  }
  const std::string serialized = SerializeCalibrationArtifact(artifact);
  // Round trip before writing so a lossy artifact never reaches disk.
  RCP_ASSIGN_OR_RETURN(reparsed, ParseCalibrationArtifact(serialized));
  if (SerializeCalibrationArtifact(reparsed) != serialized) {
    return absl::InternalError("calibration artifact does not round-trip");
  }
  if (absl::Status s =
          WriteFileAtomic(Path(out, "calibration.json"), serialized);
      !s.ok()) {
    return s;
  }
  std::cout << "calibrated " << truth.size()
            << " points: q_alpha=" << FormatDouble(artifact.q_alpha)
            << " q_calibration=" << FormatDouble(artifact.q_calibration);
  if (artifact.q_corrected.has_value()) {
    std::cout << " q_corrected=" << FormatDouble(*artifact.q_corrected);
  }
  std::cout << "\n";
  return WriteResolved(c, out);
}

absl::Status RunPredict(const KeyValueConfig& c, const std::string& out,
                        int /*workers*/) {
  RCP_ASSIGN_OR_RETURN(artifact_path, c.GetString("calibration", ""));
  RCP_ASSIGN_OR_RETURN(artifact_text, ReadFile(artifact_path));
  RCP_ASSIGN_OR_RETURN(artifact, ParseCalibrationArtifact(artifact_text));
  if (artifact.table.rows.empty()) {
    return absl::InvalidArgumentError("calibration artifact has no rows");
  }
  // Thresholds are recomputed from the stored distributions; a mismatch means
  // the artifact was edited or produced by an incompatible build.
  std::vector<ScoreDistribution> truth;
  for (const CalibrationRow& row : artifact.table.rows) {
    truth.push_back(row.dist);
  }
  RCP_ASSIGN_OR_RETURN(rebuilt, BuildCalibrationArtifact(truth, artifact.alpha,
                                                         artifact.evasion));
  if (SerializeCalibrationArtifact(rebuilt) !=
      SerializeCalibrationArtifact(artifact)) {
    return absl::InternalError(
        "calibration artifact is inconsistent with its stored distributions");
  }
  RCP_ASSIGN_OR_RETURN(method, c.GetString("method", ""));
  if (method != "vanilla" && method != "robust" && method != "corrected") {
    return absl::InvalidArgumentError(absl::StrCat(
        "method '", method, "' is not vanilla, robust or corrected"));
  }
  if (method == "corrected" && !artifact.evasion.eta.has_value()) {
    return absl::FailedPreconditionError(
        "method=corrected needs an artifact calibrated with eta > 0");
  }
  const BinGrid& grid = artifact.table.rows[0].dist.grid;
  RCP_ASSIGN_OR_RETURN(scores_path, c.GetString("scores", ""));
  RCP_ASSIGN_OR_RETURN(dists, LoadDistributions(scores_path, grid));
  const int classes = dists.empty() ? 0 : static_cast<int>(dists[0].size());

  RCP_ASSIGN_OR_RETURN(observed, Certifier::Create(artifact.evasion.scheme,
                                                   artifact.evasion.model,
                                                   InputView::kObserved));
  std::optional<CorrectedCalibration> corrected;
  std::optional<TestTimeCorrection> test_time_corrected;
  if (method == "corrected") {
    if (artifact.evasion.mode == EvasionMode::kCalibrationTime) {
      RCP_ASSIGN_OR_RETURN(cc,
                           CorrectedCalibrate(artifact.table, artifact.alpha,
                                              *artifact.evasion.eta));
      corrected = std::move(cc);
    } else {
      RCP_ASSIGN_OR_RETURN(tc, TestTimeCorrectedCalibrate(
                                   artifact.table.SmoothMeans(), artifact.alpha,
                                   *artifact.evasion.eta));
      test_time_corrected = tc;
    }
  }
  double threshold = artifact.q_alpha;
  if (method == "robust" &&
      artifact.evasion.mode == EvasionMode::kCalibrationTime) {
    threshold = artifact.q_calibration;
  } else if (method == "corrected") {
    threshold = *artifact.q_corrected;
  }

  std::vector<PredictionSet> sets;
  double ledger_consumed = 0.0;
  for (const std::vector<ScoreDistribution>& point : dists) {
    const PredictionSet vanilla = SmoothMeanSet(point, artifact.q_alpha);
    PredictionSet set;
    if (method == "vanilla") {
      set = vanilla;
    } else if (method == "robust") {
      set = artifact.evasion.mode == EvasionMode::kCalibrationTime
                ? SmoothMeanSet(point, threshold)
                : TestTimeSet(point, threshold, observed,
                              artifact.evasion.bound_kind);
    } else if (corrected.has_value()) {
      BudgetLedger ledger(0.0);
      RCP_ASSIGN_OR_RETURN(s, CorrectedSet(point, *corrected, &ledger));
      ledger_consumed = std::max(ledger_consumed, ledger.consumed());
      set = std::move(s);
    } else {
      RCP_ASSIGN_OR_RETURN(
          s, TestTimeCorrectedSet(point, *test_time_corrected, observed,
                                  artifact.evasion.bound_kind));
      set = std::move(s);
    }
    if (!std::includes(set.members.begin(), set.members.end(),
                       vanilla.members.begin(), vanilla.members.end())) {
      return absl::InternalError("robust set misses a vanilla member");
    }
    sets.push_back(std::move(set));
  }
  if (artifact.evasion.eta.has_value() &&
      ledger_consumed > *artifact.evasion.eta * (1.0 + 1e-12)) {
    return absl::InternalError("Monte-Carlo budget ledger exceeds eta");
  }

  json report;
  report["format"] = "robust_cp prediction";
  report["version"] = kFormatVersion;
  report["method"] = method;
  report["mode"] = artifact.evasion.mode == EvasionMode::kCalibrationTime
                       ? "calibration_time"
                       : "test_time";
  report["threshold"] = Number(threshold);
  report["num_points"] = sets.size();
  report["num_classes"] = classes;
  report["metrics"] = nullptr;
  RCP_ASSIGN_OR_RETURN(labels_path, c.GetString("labels", ""));
  if (!labels_path.empty()) {
    RCP_ASSIGN_OR_RETURN(labels, LoadLabels(labels_path, dists.size(),
                                            static_cast<size_t>(classes)));
    if (!sets.empty()) {
      RCP_ASSIGN_OR_RETURN(m, Evaluate(sets, labels, classes));
      report["metrics"] = {{"num_points", m.num_points},
                           {"coverage", m.empirical_coverage},
                           {"avg_set_size", m.avg_set_size},
                           {"singleton_hit_ratio", m.singleton_hit_ratio},
                           {"set_size_histogram", m.set_size_histogram}};
    }
  }
  if (absl::Status s =
          WriteFileAtomic(Path(out, "sets.csv"), FormatSetsCsv(sets));
      !s.ok()) {
    return s;
  }
  if (absl::Status s =
          WriteFileAtomic(Path(out, "prediction.json"), report.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  std::cout << "predicted " << sets.size() << " sets with threshold "
            << FormatDouble(threshold) << "\n";
  return WriteResolved(c, out);
}

absl::Status RunCertifyPoisoning(const KeyValueConfig& c,
                                 const std::string& out, int /*workers*/) {
  RCP_ASSIGN_OR_RETURN(path, c.GetString("instance", ""));
  RCP_ASSIGN_OR_RETURN(kind, c.GetString("kind", ""));
  RCP_ASSIGN_OR_RETURN(k, c.GetInt("k", 0));
  RCP_ASSIGN_OR_RETURN(alpha, c.GetDouble("alpha", 0));
  RCP_ASSIGN_OR_RETURN(objective_name, c.GetString("objective", ""));
  RCP_ASSIGN_OR_RETURN(oracle, c.GetBool("oracle", false));
  if (objective_name != "certify" && objective_name != "attack") {
    return absl::InvalidArgumentError(absl::StrCat(
        "objective '", objective_name, "' is not certify or attack"));
  }
  const PoisonObjective objective = objective_name == "certify"
                                        ? PoisonObjective::kMinimize
                                        : PoisonObjective::kMaximize;
  if (k < 0 || k > (int64_t{1} << 30)) {
    return absl::InvalidArgumentError("k must be >= 0");
  }
  RCP_ASSIGN_OR_RETURN(text, ReadFile(path));
  json report;
  report["format"] = "robust_cp poisoning";
  report["version"] = kFormatVersion;
  report["kind"] = kind;
  report["objective"] = objective_name;
  report["k"] = k;
  report["alpha"] = alpha;
  ConservativeThreshold result;
  std::optional<double> brute;
  json witness = json::array();
  if (kind == "feature") {
    RCP_ASSIGN_OR_RETURN(inst, ParseFeaturePoisonCsv(text));
    inst.k = static_cast<int>(k);
    inst.alpha = alpha;
    RCP_ASSIGN_OR_RETURN(solved, SolveFeaturePoison(inst, objective));
    RCP_ASSIGN_OR_RETURN(replay, ReplayFeatureWitness(inst, solved));
    if (replay != solved.q) {
      return absl::InternalError("witness replay does not reproduce q");
    }
    if (oracle) {
      RCP_ASSIGN_OR_RETURN(b, BruteForceFeaturePoison(inst, objective));
      brute = b;
    }
    for (const PoisonChange& change : solved.witness) {
      witness.push_back({{"point", change.point}, {"value", change.value}});
    }
    RCP_ASSIGN_OR_RETURN(observed, ConformalQuantile(inst.scores, alpha));
    report["observed_quantile"] = Number(observed);
    result = std::move(solved);
  } else if (kind == "label") {
    RCP_ASSIGN_OR_RETURN(inst, ParseLabelPoisonCsv(text));
    inst.k = static_cast<int>(k);
    inst.alpha = alpha;
    RCP_ASSIGN_OR_RETURN(solved, SolveLabelPoison(inst, objective));
    RCP_ASSIGN_OR_RETURN(replay, ReplayLabelWitness(inst, solved));
    if (replay != solved.q) {
      return absl::InternalError("witness replay does not reproduce q");
    }
    if (oracle) {
      RCP_ASSIGN_OR_RETURN(b, BruteForceLabelPoison(inst, objective));
      brute = b;
    }
    for (const PoisonChange& change : solved.witness) {
      witness.push_back({{"point", change.point}, {"label", change.label}});
    }
    std::vector<double> true_scores;
    for (size_t i = 0; i < inst.labels.size(); ++i) {
      true_scores.push_back(inst.score_matrix[i][inst.labels[i]]);
    }
    RCP_ASSIGN_OR_RETURN(observed, ConformalQuantile(true_scores, alpha));
    report["observed_quantile"] = Number(observed);
    result = std::move(solved);
  } else {
    return absl::InvalidArgumentError(
        absl::StrCat("kind '", kind, "' is not feature or label"));
  }
  report["threshold"] = Number(result.q);
  report["order_index"] = result.order_index;
  report["witness"] = std::move(witness);
  report["witness_replay_ok"] = true;
  if (brute.has_value()) {
    report["oracle"] = {{"threshold", Number(*brute)},
                        {"match", *brute == result.q}};
  } else {
    report["oracle"] = nullptr;
  }
  if (absl::Status s =
          WriteFileAtomic(Path(out, "poisoning.json"), report.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  std::cout << kind << " poisoning " << objective_name << " k=" << k
            << " threshold=" << FormatDouble(result.q) << "\n";
  if (brute.has_value() && *brute != result.q) {
    return absl::InternalError(
        absl::StrCat("brute-force oracle disagrees: ", FormatDouble(*brute),
                     " vs ", FormatDouble(result.q)));
  }
  return WriteResolved(c, out);
}

absl::Status RunSimulate(const KeyValueConfig& c, const std::string& out,
                         int workers) {
  RCP_ASSIGN_OR_RETURN(config, ExperimentConfigFromKeyValue(c));
  config.workers = workers;
  RCP_ASSIGN_OR_RETURN(result, RunExperiment(config));
  if (absl::Status s = WriteExperimentOutputs(result, out); !s.ok()) return s;
  if (absl::Status s = WriteResolved(ExperimentConfigToKeyValue(config), out);
      !s.ok()) {
    return s;
  }
  int failed = 0;
  for (const TrialResult& trial : result.trials) failed += !trial.ok;
  std::cout << "simulated " << result.trials.size() << " trials (" << failed
            << " failed), " << result.aggregate.size() << " aggregate rows, "
            << result.invariant_violations.size() << " invariant violations\n";
  if (!result.invariant_violations.empty()) {
    return absl::InternalError(absl::StrCat(
        result.invariant_violations.size(),
        " invariant violations; first: ", result.invariant_violations[0]));
  }
  return absl::OkStatus();
}

absl::Status RunOracleCheck(const KeyValueConfig& c, const std::string& out,
                            int /*workers*/) {
  RCP_ASSIGN_OR_RETURN(seed, c.GetInt("seed", 0));
  RCP_ASSIGN_OR_RETURN(lp_instances, c.GetInt("lp_instances", 0));
  RCP_ASSIGN_OR_RETURN(poison_instances, c.GetInt("poison_instances", 0));
  RCP_ASSIGN_OR_RETURN(gaussian_instances, c.GetInt("gaussian_instances", 0));
  RCP_ASSIGN_OR_RETURN(max_total, c.GetInt("region_max_total", 0));
  if (seed < 0 || lp_instances < 0 || poison_instances < 0 ||
      gaussian_instances < 0 || max_total < 0 || max_total > 16) {
    return absl::InvalidArgumentError(
        "counts must be >= 0 and region_max_total at most 16");
  }
  std::vector<OracleCheckResult> results = CheckGaussianClosedForms(
      static_cast<uint64_t>(seed), static_cast<int>(gaussian_instances));
  results.push_back(CheckRegionTables(static_cast<int>(max_total)));
  for (const OracleCheckResult& r : CheckGreedyAgainstLp(
           static_cast<uint64_t>(seed), static_cast<int>(lp_instances))) {
    results.push_back(r);
  }
  for (const OracleCheckResult& r : CheckPoisoningAgainstBruteForce(
           static_cast<uint64_t>(seed), static_cast<int>(poison_instances))) {
    results.push_back(r);
  }
  json report;
  report["format"] = "robust_cp oracle-check";
  report["version"] = kFormatVersion;
  json checks = json::array();
  int failed = 0;
  for (const OracleCheckResult& r : results) {
    failed += !r.passed();
    checks.push_back({{"name", r.name},
                      {"instances", r.instances},
                      {"max_error", Number(r.max_error)},
                      {"tolerance", r.tolerance},
                      {"errors", r.errors},
                      {"passed", r.passed()}});
    std::cout << (r.passed() ? "PASS " : "FAIL ") << r.name
              << " instances=" << r.instances
              << " max_error=" << FormatDouble(r.max_error)
              << " tolerance=" << FormatDouble(r.tolerance)
              << " errors=" << r.errors << "\n";
  }
  report["checks"] = std::move(checks);
  if (absl::Status s = WriteFileAtomic(Path(out, "oracle_check.json"),
                                       report.dump(2) + "\n");
      !s.ok()) {
    return s;
  }
  if (absl::Status s = WriteResolved(c, out); !s.ok()) return s;
  if (failed > 0) {
    return absl::InternalError(absl::StrCat(failed, " oracle checks failed"));
  }
  return absl::OkStatus();
}

#undef RCP_ASSIGN_OR_RETURN

std::vector<KeySpec> SimulateKeys() {
  std::vector<KeySpec> keys;
  const KeyValueConfig defaults =
      ExperimentConfigToKeyValue(ExperimentConfig{});
  for (const auto& [name, value] : defaults.entries()) {
    keys.push_back({name, value, "experiment setting (docs/formats.md)"});
  }
  return keys;
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return 0;
    case absl::StatusCode::kFailedPrecondition:
      return 4;
    case absl::StatusCode::kInternal:
      return 3;
    default:
      return 2;
  }
}

const std::vector<Command>& Commands() {
  static const std::vector<Command>* commands = new std::vector<Command>{
      {"calibrate",
       "Certify calibration scores and write calibration.json",
       {{"scores", "", "score tensor file (CSV or binary)", true},
        {"labels", "", "labels CSV for the calibration points", true},
        {"alpha", "0.1", "miscoverage level"},
        {"scheme", "gaussian", "smoothing scheme: gaussian or sparse"},
        {"sigma", "0.25", "gaussian noise standard deviation"},
        {"p0", "0.01", "sparse flip probability 0 -> 1"},
        {"p1", "0.6", "sparse flip probability 1 -> 0"},
        {"threat", "l2", "threat model: l2 or binary"},
        {"radius", "0.125", "L2 radius"},
        {"r_a", "1", "binary additions budget"},
        {"r_d", "1", "binary deletions budget"},
        {"mode", "calibration_time", "calibration_time or test_time"},
        {"bound_kind", "cdf", "mean or cdf"},
        {"eta", "0", "Monte-Carlo failure budget; 0 disables correction"},
        {"bins", "51", "number of uniform CDF bin edges on [0, 1]"}},
       &RunCalibrate},
      {"predict",
       "Build prediction sets from a calibration artifact",
       {{"calibration", "", "calibration.json from the calibrate command",
         true},
        {"scores", "", "score tensor file for the test points", true},
        {"labels", "", "optional labels CSV; enables metrics"},
        {"method", "robust", "vanilla, robust or corrected"}},
       &RunPredict},
      {"certify-poisoning",
       "Conservative threshold under calibration poisoning",
       {{"instance", "", "feature-poison or label-poison CSV", true},
        {"kind", "feature", "feature or label"},
        {"k", "1", "number of poisoned calibration points"},
        {"alpha", "0.1", "miscoverage level"},
        {"objective", "certify",
         "certify (lowest quantile) or attack (highest quantile)"},
        {"oracle", "false", "cross-check against brute force"}},
       &RunCertifyPoisoning},
      {"simulate", "Run the synthetic experiment suite", SimulateKeys(),
       &RunSimulate},
      {"oracle-check",
       "Compare solvers and bounds against independent oracles",
       {{"seed", "0", "seed for random instances"},
        {"gaussian_instances", "1000", "random Gaussian bound instances"},
        {"region_max_total", "10", "largest r_a + r_d for region tables"},
        {"lp_instances", "500", "random greedy-vs-LP instances"},
        {"poison_instances", "1000", "random poisoning instances per kind"}},
       &RunOracleCheck},
  };
  return *commands;
}

}  // namespace robust_cp::cli
