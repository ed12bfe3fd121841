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

#include "robust_cp/io/formats.h"

#include <cmath>
#include <string>
#include <vector>

#include "gmock/gmock.h"
#include "gtest/gtest.h"
#include "robust_cp/io/artifact.h"
#include "robust_cp/random/philox.h"

namespace robust_cp {
namespace {

using ::testing::ElementsAre;
using ::testing::HasSubstr;

ScoreTensor RandomTensor(int64_t points, int64_t classes, int64_t samples,
                         uint64_t seed) {
  ScoreTensor t{points, classes, samples, {}};
  Philox4x64 rng(seed, 0, 0);
  for (int64_t i = 0; i < points * classes * samples; ++i) {
    // Mix grid values with arbitrary floats, including both endpoints.
    const double u = rng.Uniform();
    t.values.push_back(i % 7 == 0    ? 0.0f
                       : i % 11 == 0 ? 1.0f
                                     : static_cast<float>(u));
  }
  return t;
}

TEST(ScoreFormatTest, CsvAndBinaryRoundTripLosslessly) {
  const ScoreTensor t = RandomTensor(5, 3, 7, 42);
  absl::StatusOr<ScoreTensor> from_csv = ParseScoreTensor(FormatScoreCsv(t));
  ASSERT_TRUE(from_csv.ok()) << from_csv.status();
  absl::StatusOr<ScoreTensor> from_bin =
      ParseScoreTensor(FormatScoreBinary(*from_csv));
  ASSERT_TRUE(from_bin.ok()) << from_bin.status();
  EXPECT_EQ(from_bin->values, t.values);
  EXPECT_EQ(from_bin->num_points, 5);
  EXPECT_EQ(from_bin->num_classes, 3);
  EXPECT_EQ(from_bin->num_samples, 7);
  EXPECT_EQ(FormatScoreCsv(*from_bin), FormatScoreCsv(t));
}

TEST(ScoreFormatTest, CsvRowsMayAppearInAnyOrder) {
  absl::StatusOr<ScoreTensor> t = ParseScoreCsv(
      "# robust_cp scores v1\n"
      "point_id,class_id,sample_id,score\n"
      "0,1,1,0.25\n"
      "0,0,0,0.5\n"
      "0,1,0,1\n"
      "0,0,1,0\n");
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_THAT(t->values, ElementsAre(0.5f, 0.0f, 1.0f, 0.25f));
}

TEST(ScoreFormatTest, RejectsBadInput) {
  const std::string header =
      "# robust_cp scores v1\npoint_id,class_id,sample_id,score\n";
  EXPECT_FALSE(ParseScoreCsv(header + "0,0,0,1.5\n").ok());
  EXPECT_FALSE(ParseScoreCsv(header + "0,0,0,0.5\n0,0,0,0.5\n").ok());
  EXPECT_FALSE(ParseScoreCsv(header + "0,0,0,0.5\n0,0,2,0.5\n").ok());
  EXPECT_FALSE(ParseScoreCsv(header + "0,0,0,abc\n").ok());
  absl::StatusOr<ScoreTensor> version = ParseScoreCsv(
      "# robust_cp scores v2\npoint_id,class_id,sample_id,score\n");
  EXPECT_EQ(version.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_FALSE(ParseScoreCsv("# robust_cp labels v1\npoint_id,label\n").ok());

  std::string bin = FormatScoreBinary(RandomTensor(2, 2, 2, 1));
  EXPECT_FALSE(ParseScoreBinary(bin.substr(0, bin.size() - 1)).ok());
  std::string bad_version = bin;
  bad_version[4] = 9;
  EXPECT_FALSE(ParseScoreBinary(bad_version).ok());
}

TEST(ScoreFormatTest, EmptyTensorRoundTrips) {
  const ScoreTensor empty;
  absl::StatusOr<ScoreTensor> t = ParseScoreTensor(FormatScoreCsv(empty));
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_EQ(t->num_points, 0);
  absl::StatusOr<std::vector<std::vector<ScoreDistribution>>> dists =
      DistributionsFromTensor(*t, BinGrid::Uniform(11));
  ASSERT_TRUE(dists.ok());
  EXPECT_TRUE(dists->empty());
}

TEST(ScoreFormatTest, DistributionsSummarizeEachCell) {
  const ScoreTensor t{1, 2, 4, {0.0f, 0.5f, 0.5f, 1.0f, 1, 1, 1, 1}};
  absl::StatusOr<std::vector<std::vector<ScoreDistribution>>> d =
      DistributionsFromTensor(t, BinGrid::Uniform(3));
  ASSERT_TRUE(d.ok()) << d.status();
  ASSERT_EQ(d->size(), 1u);
  EXPECT_DOUBLE_EQ((*d)[0][0].mean, 0.5);
  EXPECT_DOUBLE_EQ((*d)[0][1].mean, 1.0);
  EXPECT_EQ((*d)[0][0].sample_count, 4);
}

TEST(LabelAndSetFormatTest, RoundTrip) {
  const std::vector<int> labels = {2, 0, 1, 1};
  absl::StatusOr<std::vector<int>> parsed =
      ParseLabelsCsv(FormatLabelsCsv(labels));
  ASSERT_TRUE(parsed.ok()) << parsed.status();
  EXPECT_EQ(*parsed, labels);
  EXPECT_FALSE(
      ParseLabelsCsv("# robust_cp labels v1\npoint_id,label\n1,0\n").ok());
  EXPECT_FALSE(
      ParseLabelsCsv("# robust_cp labels v1\npoint_id,label\n0,-1\n").ok());

  std::vector<PredictionSet> sets(3);
  sets[0].members = {0, 2};
  sets[2].members = {1};
  const std::string text = FormatSetsCsv(sets);
  EXPECT_THAT(text, HasSubstr("0,2,0;2\n1,0,\n2,1,1\n"));
  absl::StatusOr<std::vector<PredictionSet>> back = ParseSetsCsv(text);
  ASSERT_TRUE(back.ok()) << back.status();
  ASSERT_EQ(back->size(), 3u);
  EXPECT_THAT((*back)[0].members, ElementsAre(0, 2));
  EXPECT_TRUE((*back)[1].members.empty());
}

TEST(PoisonFormatTest, RoundTrip) {
  FeaturePoisonInstance f;
  f.scores = {0.5, 0.25};
  f.lower = {0.125, 0.25};
  f.upper = {1.0, 0.75};
  absl::StatusOr<FeaturePoisonInstance> f2 =
      ParseFeaturePoisonCsv(FormatFeaturePoisonCsv(f));
  ASSERT_TRUE(f2.ok()) << f2.status();
  EXPECT_EQ(f2->scores, f.scores);
  EXPECT_EQ(f2->lower, f.lower);
  EXPECT_EQ(f2->upper, f.upper);

  LabelPoisonInstance l;
  l.score_matrix = {{0.1, 0.9}, {0.3, 0.7}, {1.0 / 3.0, 0.0}};
  l.labels = {1, 0, 0};
  absl::StatusOr<LabelPoisonInstance> l2 =
      ParseLabelPoisonCsv(FormatLabelPoisonCsv(l));
  ASSERT_TRUE(l2.ok()) << l2.status();
  EXPECT_EQ(l2->score_matrix, l.score_matrix);
  EXPECT_EQ(l2->labels, l.labels);
  // Ordering of lower <= score <= upper is checked by the solver.
  absl::StatusOr<FeaturePoisonInstance> unordered = ParseFeaturePoisonCsv(
      "# robust_cp feature-poison v1\npoint_id,score,lower,upper\n"
      "0,0.5,0.6,0.7\n");
  ASSERT_TRUE(unordered.ok()) << unordered.status();
  EXPECT_FALSE(ValidateInstance(*unordered).ok());
}

class ArtifactTest : public ::testing::TestWithParam<EvasionConfig> {};

TEST_P(ArtifactTest, RoundTripMatchesInMemoryTable) {
  const ScoreTensor t = RandomTensor(40, 1, 25, 7);
  absl::StatusOr<std::vector<std::vector<ScoreDistribution>>> d =
      DistributionsFromTensor(t, BinGrid::Uniform(21));
  ASSERT_TRUE(d.ok()) << d.status();
  std::vector<ScoreDistribution> truth;
  for (const auto& row : *d) truth.push_back(row[0]);
  absl::StatusOr<CalibrationArtifact> built =
      BuildCalibrationArtifact(truth, 0.1, GetParam());
  ASSERT_TRUE(built.ok()) << built.status();
  const std::string text = SerializeCalibrationArtifact(*built);
  absl::StatusOr<CalibrationArtifact> parsed = ParseCalibrationArtifact(text);
  ASSERT_TRUE(parsed.ok()) << parsed.status();

  EXPECT_EQ(parsed->q_alpha, built->q_alpha);
  EXPECT_EQ(parsed->q_calibration, built->q_calibration);
  EXPECT_EQ(parsed->q_corrected, built->q_corrected);
  ASSERT_EQ(parsed->table.rows.size(), built->table.rows.size());
  for (size_t i = 0; i < truth.size(); ++i) {
    const CalibrationRow& a = built->table.rows[i];
    const CalibrationRow& b = parsed->table.rows[i];
    EXPECT_EQ(a.dist.cdf, b.dist.cdf);
    EXPECT_EQ(a.dist.mean, b.dist.mean);
    EXPECT_EQ(a.smooth_mean, b.smooth_mean);
    EXPECT_EQ(a.lower, b.lower);
    if (std::isnan(a.corrected_lower)) {
      EXPECT_TRUE(std::isnan(b.corrected_lower));
    } else {
      EXPECT_EQ(a.corrected_lower, b.corrected_lower);
    }
  }
  EXPECT_EQ(SerializeCalibrationArtifact(*parsed), text);

  // Rebuilding from the parsed distributions reproduces the artifact.
  std::vector<ScoreDistribution> reparsed;
  for (const CalibrationRow& row : parsed->table.rows) {
    reparsed.push_back(row.dist);
  }
  absl::StatusOr<CalibrationArtifact> rebuilt =
      BuildCalibrationArtifact(reparsed, parsed->alpha, parsed->evasion);
  ASSERT_TRUE(rebuilt.ok()) << rebuilt.status();
  EXPECT_EQ(SerializeCalibrationArtifact(*rebuilt), text);
}

EvasionConfig Config(SmoothingScheme scheme, ThreatModel model,
                     EvasionMode mode, BoundKind kind,
                     std::optional<double> eta) {
  return EvasionConfig{scheme, model, mode, kind, eta};
}

std::string ConfigName(const ::testing::TestParamInfo<EvasionConfig>& info) {
  static const char* const kNames[] = {"GaussianCdf", "GaussianMeanCorrected",
                                       "SparseTestTimeCorrected"};
  return kNames[info.index];
}

INSTANTIATE_TEST_SUITE_P(
    Configs, ArtifactTest,
    ::testing::Values(Config(GaussianNoise{0.25}, L2Ball{0.125},
                             EvasionMode::kCalibrationTime, BoundKind::kCdf,
                             std::nullopt),
                      Config(GaussianNoise{0.5}, L2Ball{0.25},
                             EvasionMode::kCalibrationTime, BoundKind::kMean,
                             0.01),
                      Config(SparseFlipNoise{0.01, 0.6}, BinaryBall{1, 1},
                             EvasionMode::kTestTime, BoundKind::kCdf, 0.02)),
    ConfigName);

TEST(ArtifactParseTest, RejectsUnknownVersionAndGarbage) {
  EXPECT_FALSE(ParseCalibrationArtifact("not json").ok());
  EXPECT_FALSE(ParseCalibrationArtifact("{}").ok());
  CalibrationArtifact empty;
  std::string text = SerializeCalibrationArtifact(empty);
  ASSERT_TRUE(ParseCalibrationArtifact(text).ok());
  const size_t pos = text.find("\"version\": 1");
  ASSERT_NE(pos, std::string::npos);
  text.replace(pos, 12, "\"version\": 2");
  absl::StatusOr<CalibrationArtifact> parsed = ParseCalibrationArtifact(text);
  EXPECT_EQ(parsed.status().code(), absl::StatusCode::kInvalidArgument);
  EXPECT_THAT(parsed.status().message(), HasSubstr("version"));
}

}  // namespace
}  // namespace robust_cp
