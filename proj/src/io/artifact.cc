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

#include "robust_cp/io/artifact.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "json.hpp"

namespace robust_cp {
namespace {

using nlohmann::json;

json Number(double value) {
  if (!std::isfinite(value)) return nullptr;
  return value;
}

double NumberOr(const json& value, double null_value) {
  return value.is_null() ? null_value : value.get<double>();
}

json SchemeJson(const SmoothingScheme& scheme) {
  if (const auto* g = std::get_if<GaussianNoise>(&scheme)) {
    return {{"kind", "gaussian"}, {"sigma", g->sigma}};
  }
  const auto& s = std::get<SparseFlipNoise>(scheme);
  return {{"kind", "sparse"}, {"p0", s.p0}, {"p1", s.p1}};
}

json ThreatJson(const ThreatModel& model) {
  if (const auto* b = std::get_if<L2Ball>(&model)) {
    return {{"kind", "l2"}, {"r", b->r}};
  }
  const auto& b = std::get<BinaryBall>(model);
  return {{"kind", "binary"}, {"r_a", b.r_a}, {"r_d", b.r_d}};
}

SmoothingScheme SchemeFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") return GaussianNoise{j.at("sigma").get<double>()};
  if (kind == "sparse") {
    return SparseFlipNoise{j.at("p0").get<double>(), j.at("p1").get<double>()};
  }
  throw std::invalid_argument("unknown scheme kind '" + kind + "'");
}

ThreatModel ThreatFromJson(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "l2") return L2Ball{j.at("r").get<double>()};
  if (kind == "binary") {
    return BinaryBall{j.at("r_a").get<int>(), j.at("r_d").get<int>()};
  }
  throw std::invalid_argument("unknown threat model kind '" + kind + "'");
}

}  // namespace

absl::StatusOr<CalibrationArtifact> BuildCalibrationArtifact(
    std::span<const ScoreDistribution> true_label_dists, double alpha,
    const EvasionConfig& config) {
  absl::StatusOr<CalibrationResult> calibration =
      CalibrateSmooth(true_label_dists, alpha, config);
  if (!calibration.ok()) return calibration.status();
  for (const ScoreDistribution& dist : true_label_dists) {
    if (!(dist.grid == true_label_dists[0].grid)) {
      return absl::InvalidArgumentError(
          "calibration distributions use different bin grids");
    }
  }
  CalibrationArtifact artifact;
  artifact.evasion = config;
  artifact.alpha = alpha;
  artifact.q_alpha = calibration->q_alpha;
  artifact.table = std::move(calibration->table);
  absl::StatusOr<double> q_cal =
      CalibrationTimeThreshold(artifact.table, alpha);
  if (!q_cal.ok()) return q_cal.status();
  artifact.q_calibration = *q_cal;
  if (config.eta.has_value()) {
    if (config.mode == EvasionMode::kCalibrationTime) {
      absl::StatusOr<CorrectedCalibration> corrected =
          CorrectedCalibrate(artifact.table, alpha, *config.eta);
      if (!corrected.ok()) return corrected.status();
      artifact.q_corrected = corrected->threshold;
    } else {
      absl::StatusOr<TestTimeCorrection> corrected = TestTimeCorrectedCalibrate(
          artifact.table.SmoothMeans(), alpha, *config.eta);
      if (!corrected.ok()) return corrected.status();
      artifact.q_corrected = corrected->q_mc;
    }
  }
  return artifact;
}

std::string SerializeCalibrationArtifact(const CalibrationArtifact& artifact) {
  json j;
  j["format"] = "robust_cp calibration";
  j["version"] = kArtifactVersion;
  j["scheme"] = SchemeJson(artifact.evasion.scheme);
  j["threat_model"] = ThreatJson(artifact.evasion.model);
  j["mode"] = artifact.evasion.mode == EvasionMode::kCalibrationTime
                  ? "calibration_time"
                  : "test_time";
  j["bound_kind"] = BoundKindName(artifact.evasion.bound_kind);
  j["eta"] = artifact.evasion.eta.has_value() ? json(*artifact.evasion.eta)
                                              : json(nullptr);
  j["alpha"] = artifact.alpha;
  j["q_alpha"] = Number(artifact.q_alpha);
  j["q_calibration"] = Number(artifact.q_calibration);
  j["q_corrected"] = artifact.q_corrected.has_value()
                         ? Number(*artifact.q_corrected)
                         : json(nullptr);
  const std::span<const double> edges =
      artifact.table.rows.empty() ? std::span<const double>()
                                  : artifact.table.rows[0].dist.grid.edges();
  j["bin_edges"] = std::vector<double>(edges.begin(), edges.end());
  json rows = json::array();
  for (const CalibrationRow& row : artifact.table.rows) {
    rows.push_back({{"sample_count", row.dist.sample_count},
                    {"mean", row.dist.mean},
                    {"variance", row.dist.variance},
                    {"cdf", row.dist.cdf},
                    {"smooth_mean", row.smooth_mean},
                    {"lower", Number(row.lower)},
                    {"corrected_lower", Number(row.corrected_lower)}});
  }
  j["rows"] = std::move(rows);
  return j.dump(2) + "\n";
}

absl::StatusOr<CalibrationArtifact> ParseCalibrationArtifact(
    std::string_view text) {
  try {
    const json j = json::parse(text);
    if (j.at("format").get<std::string>() != "robust_cp calibration") {
      return absl::InvalidArgumentError("not a calibration artifact");
    }
    const int version = j.at("version").get<int>();
    if (version != kArtifactVersion) {
      return absl::InvalidArgumentError(
          absl::StrCat("unsupported calibration artifact version ", version));
    }
    CalibrationArtifact artifact;
    artifact.evasion.scheme = SchemeFromJson(j.at("scheme"));
    artifact.evasion.model = ThreatFromJson(j.at("threat_model"));
    const std::string mode = j.at("mode").get<std::string>();
    if (mode != "calibration_time" && mode != "test_time") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown mode '", mode, "'"));
    }
    artifact.evasion.mode = mode == "calibration_time"
                                ? EvasionMode::kCalibrationTime
                                : EvasionMode::kTestTime;
    const std::string kind = j.at("bound_kind").get<std::string>();
    if (kind != "mean" && kind != "cdf") {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown bound_kind '", kind, "'"));
    }
    artifact.evasion.bound_kind =
        kind == "mean" ? BoundKind::kMean : BoundKind::kCdf;
    if (!j.at("eta").is_null()) artifact.evasion.eta = j["eta"].get<double>();
    artifact.alpha = j.at("alpha").get<double>();
    artifact.q_alpha = NumberOr(j.at("q_alpha"), kAcceptAll);
    artifact.q_calibration = NumberOr(j.at("q_calibration"), kAcceptAll);
    if (artifact.evasion.eta.has_value()) {
      artifact.q_corrected = NumberOr(j.at("q_corrected"), kAcceptAll);
    }
    artifact.table.bound_kind = artifact.evasion.bound_kind;
    const json& rows = j.at("rows");
    if (rows.empty()) return artifact;
    absl::StatusOr<BinGrid> grid =
        BinGrid::Create(j.at("bin_edges").get<std::vector<double>>());
    if (!grid.ok()) return grid.status();
    for (const json& r : rows) {
      absl::StatusOr<ScoreDistribution> dist = DistributionFromCdf(
          r.at("sample_count").get<int64_t>(), r.at("mean").get<double>(),
          r.at("variance").get<double>(), *grid,
          r.at("cdf").get<std::vector<double>>());
      if (!dist.ok()) return dist.status();
      CalibrationRow row;
      row.dist = *std::move(dist);
      row.smooth_mean = r.at("smooth_mean").get<double>();
      row.lower = NumberOr(r.at("lower"), kAcceptAll);
      row.corrected_lower = NumberOr(r.at("corrected_lower"),
                                     std::numeric_limits<double>::quiet_NaN());
      artifact.table.rows.push_back(std::move(row));
    }
    return artifact;
  } catch (const std::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("malformed calibration artifact: ", e.what()));
  }
}

}  // namespace robust_cp
