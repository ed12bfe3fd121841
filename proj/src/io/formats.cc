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

#include <bit>
#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>

#include "absl/strings/str_cat.h"
#include "robust_cp/io/config.h"

namespace robust_cp {
namespace {

constexpr std::string_view kScoreMagic = "RCPS";
constexpr std::string_view kScoreHeader = "point_id,class_id,sample_id,score";
constexpr std::string_view kLabelHeader = "point_id,label";
constexpr std::string_view kSetsHeader = "point_id,set_size,members";
constexpr std::string_view kFeatureHeader = "point_id,score,lower,upper";
// Refuse tensors whose declared size would not fit in memory.
constexpr int64_t kMaxTensorValues = int64_t{1} << 31;

static_assert(std::endian::native == std::endian::little,
              "binary score files are read with native little-endian loads");

absl::Status LineError(int line, std::string_view message) {
  return absl::InvalidArgumentError(
      absl::StrCat("line ", line, ": ", std::string(message)));
}

// Splits on '\n', drops a trailing '\r' and the final empty line.
std::vector<std::string_view> Lines(std::string_view text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> Fields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (size_t pos; (pos = line.find(',', start)) != std::string_view::npos;
       start = pos + 1) {
    fields.push_back(line.substr(start, pos - start));
  }
  fields.push_back(line.substr(start));
  return fields;
}

template <typename T>
bool ParseNumber(std::string_view field, T& out) {
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

template <typename T>
std::string FormatNumber(T value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

// Checks the `# robust_cp <kind> v1` line and the column header; returns the
// index of the first data line.
absl::StatusOr<size_t> CheckPreamble(const std::vector<std::string_view>& lines,
                                     std::string_view kind,
                                     std::string_view header) {
  const std::string prefix = absl::StrCat("# robust_cp ", std::string(kind));
  if (lines.empty() || !lines[0].starts_with(prefix + " v")) {
    return absl::InvalidArgumentError(absl::StrCat(
        "missing '", prefix, " v", kFormatVersion, "' header line"));
  }
  int version = 0;
  if (!ParseNumber(lines[0].substr(prefix.size() + 2), version) ||
      version != kFormatVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported ", std::string(kind), " format version '",
                     std::string(lines[0].substr(prefix.size() + 2)), "'"));
  }
  if (lines.size() < 2 || !lines[1].starts_with(header)) {
    return LineError(2, absl::StrCat("expected column header '",
                                     std::string(header), "'"));
  }
  return 2;
}

std::string Preamble(std::string_view kind, std::string_view header) {
  return absl::StrCat("# robust_cp ", std::string(kind), " v", kFormatVersion,
                      "\n", std::string(header), "\n");
}

absl::Status CheckScore(double score, int line) {
  if (!(score >= 0.0 && score <= 1.0)) {
    return LineError(line, "score must lie in [0, 1]");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<ScoreTensor> ParseScoreCsv(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  absl::StatusOr<size_t> first = CheckPreamble(lines, "scores", kScoreHeader);
  if (!first.ok()) return first.status();
  struct Entry {
    int64_t point, cls, sample;
    float score;
  };
  std::vector<Entry> entries;
  ScoreTensor tensor;
  for (size_t i = *first; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string_view> f = Fields(lines[i]);
    Entry e;
    if (f.size() != 4 || !ParseNumber(f[0], e.point) ||
        !ParseNumber(f[1], e.cls) || !ParseNumber(f[2], e.sample) ||
        !ParseNumber(f[3], e.score)) {
      return LineError(line, "expected point_id,class_id,sample_id,score");
    }
    if (e.point < 0 || e.cls < 0 || e.sample < 0) {
      return LineError(line, "ids must be >= 0");
    }
    if (absl::Status s = CheckScore(e.score, line); !s.ok()) return s;
    tensor.num_points = std::max(tensor.num_points, e.point + 1);
    tensor.num_classes = std::max(tensor.num_classes, e.cls + 1);
    tensor.num_samples = std::max(tensor.num_samples, e.sample + 1);
    entries.push_back(e);
  }
  const int64_t total =
      tensor.num_points * tensor.num_classes * tensor.num_samples;
  if (total != static_cast<int64_t>(entries.size())) {
    return absl::InvalidArgumentError(absl::StrCat(
        "score file has ", entries.size(), " rows but ids span ",
        tensor.num_points, " x ", tensor.num_classes, " x ", tensor.num_samples,
        "; every (point, class, sample) must appear exactly once"));
  }
  tensor.values.assign(total, std::numeric_limits<float>::quiet_NaN());
  for (const Entry& e : entries) {
    float& slot =
        tensor.values[(e.point * tensor.num_classes + e.cls) *
                          tensor.num_samples +
                      e.sample];
    if (!std::isnan(slot)) {
      return absl::InvalidArgumentError(
          absl::StrCat("duplicate score for point ", e.point, " class ", e.cls,
                       " sample ", e.sample));
    }
    slot = e.score;
  }
  return tensor;
}

std::string FormatScoreCsv(const ScoreTensor& tensor) {
  std::string out = Preamble("scores", kScoreHeader);
  for (int64_t p = 0; p < tensor.num_points; ++p) {
    for (int64_t c = 0; c < tensor.num_classes; ++c) {
      for (int64_t s = 0; s < tensor.num_samples; ++s) {
        absl::StrAppend(&out, p, ",", c, ",", s, ",",
                        FormatNumber(tensor.at(p, c, s)), "\n");
      }
    }
  }
  return out;
}

absl::StatusOr<ScoreTensor> ParseScoreBinary(std::string_view bytes) {
  constexpr size_t kHeaderSize = 4 + 4 * 5;
  if (bytes.size() < kHeaderSize || !bytes.starts_with(kScoreMagic)) {
    return absl::InvalidArgumentError("not a binary score file");
  }
  uint32_t header[5];
  std::memcpy(header, bytes.data() + 4, sizeof(header));
  const uint32_t version = header[0];
  const uint32_t rank = header[1];
  if (version != kFormatVersion) {
    return absl::InvalidArgumentError(
        absl::StrCat("unsupported binary score version ", version));
  }
  if (rank != 3) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary score rank ", rank, ", expected 3"));
  }
  ScoreTensor tensor;
  tensor.num_points = header[2];
  tensor.num_classes = header[3];
  tensor.num_samples = header[4];
  const int64_t total =
      tensor.num_points * tensor.num_classes * tensor.num_samples;
  if (total > kMaxTensorValues) {
    return absl::InvalidArgumentError("binary score tensor too large");
  }
  if (bytes.size() != kHeaderSize + 4 * static_cast<size_t>(total)) {
    return absl::InvalidArgumentError(
        absl::StrCat("binary score payload is ", bytes.size() - kHeaderSize,
                     " bytes, expected ", 4 * total));
  }
  tensor.values.resize(total);
  std::memcpy(tensor.values.data(), bytes.data() + kHeaderSize, 4 * total);
  for (int64_t i = 0; i < total; ++i) {
    if (!(tensor.values[i] >= 0.0f && tensor.values[i] <= 1.0f)) {
      return absl::InvalidArgumentError(
          absl::StrCat("binary score value ", i, " outside [0, 1]"));
    }
  }
  return tensor;
}

std::string FormatScoreBinary(const ScoreTensor& tensor) {
  std::string out(kScoreMagic);
  const uint32_t header[5] = {kFormatVersion, 3,
                              static_cast<uint32_t>(tensor.num_points),
                              static_cast<uint32_t>(tensor.num_classes),
                              static_cast<uint32_t>(tensor.num_samples)};
  out.append(reinterpret_cast<const char*>(header), sizeof(header));
  out.append(reinterpret_cast<const char*>(tensor.values.data()),
             4 * tensor.values.size());
  return out;
}

absl::StatusOr<ScoreTensor> ParseScoreTensor(std::string_view contents) {
  if (contents.starts_with(kScoreMagic)) return ParseScoreBinary(contents);
  return ParseScoreCsv(contents);
}

absl::StatusOr<std::vector<std::vector<ScoreDistribution>>>
DistributionsFromTensor(const ScoreTensor& tensor, const BinGrid& grid) {
  std::vector<std::vector<ScoreDistribution>> out(tensor.num_points);
  std::vector<double> samples(tensor.num_samples);
  for (int64_t p = 0; p < tensor.num_points; ++p) {
    for (int64_t c = 0; c < tensor.num_classes; ++c) {
      for (int64_t s = 0; s < tensor.num_samples; ++s) {
        samples[s] = tensor.at(p, c, s);
      }
      absl::StatusOr<ScoreDistribution> dist = SummarizeSamples(samples, grid);
      if (!dist.ok()) return dist.status();
      out[p].push_back(*std::move(dist));
    }
  }
  return out;
}

absl::StatusOr<std::vector<int>> ParseLabelsCsv(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  absl::StatusOr<size_t> first = CheckPreamble(lines, "labels", kLabelHeader);
  if (!first.ok()) return first.status();
  std::vector<int> labels;
  std::vector<bool> seen;
  for (size_t i = *first; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string_view> f = Fields(lines[i]);
    int point = 0, label = 0;
    if (f.size() != 2 || !ParseNumber(f[0], point) ||
        !ParseNumber(f[1], label) || point < 0 || label < 0) {
      return LineError(line, "expected point_id,label with ids >= 0");
    }
    if (point >= static_cast<int>(labels.size())) {
      labels.resize(point + 1, -1);
      seen.resize(point + 1, false);
    }
    if (seen[point]) {
      return LineError(line, absl::StrCat("duplicate point_id ", point));
    }
    seen[point] = true;
    labels[point] = label;
  }
  for (size_t p = 0; p < labels.size(); ++p) {
    if (!seen[p]) {
      return absl::InvalidArgumentError(
          absl::StrCat("labels file has no row for point_id ", p));
    }
  }
  return labels;
}

std::string FormatLabelsCsv(std::span<const int> labels) {
  std::string out = Preamble("labels", kLabelHeader);
  for (size_t p = 0; p < labels.size(); ++p) {
    absl::StrAppend(&out, p, ",", labels[p], "\n");
  }
  return out;
}

std::string FormatSetsCsv(std::span<const PredictionSet> sets) {
  std::string out = Preamble("sets", kSetsHeader);
  for (size_t p = 0; p < sets.size(); ++p) {
    absl::StrAppend(&out, p, ",", sets[p].members.size(), ",");
    for (size_t j = 0; j < sets[p].members.size(); ++j) {
      absl::StrAppend(&out, j == 0 ? "" : ";", sets[p].members[j]);
    }
    out += "\n";
  }
  return out;
}

absl::StatusOr<std::vector<PredictionSet>> ParseSetsCsv(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  absl::StatusOr<size_t> first = CheckPreamble(lines, "sets", kSetsHeader);
  if (!first.ok()) return first.status();
  std::vector<PredictionSet> sets;
  for (size_t i = *first; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string_view> f = Fields(lines[i]);
    int64_t point = 0, size = 0;
    if (f.size() != 3 || !ParseNumber(f[0], point) ||
        !ParseNumber(f[1], size) ||
        point != static_cast<int64_t>(sets.size())) {
      return LineError(line, "expected consecutive point_id,set_size,members");
    }
    PredictionSet set;
    std::string_view members = f[2];
    while (!members.empty()) {
      const size_t semi = members.find(';');
      int member = 0;
      if (!ParseNumber(members.substr(0, semi), member) || member < 0 ||
          (!set.members.empty() && member <= set.members.back())) {
        return LineError(line, "members must be ascending class ids");
      }
      set.members.push_back(member);
      if (semi == std::string_view::npos) break;
      members.remove_prefix(semi + 1);
    }
    if (static_cast<int64_t>(set.members.size()) != size) {
      return LineError(line, "set_size does not match members");
    }
    sets.push_back(std::move(set));
  }
  return sets;
}

absl::StatusOr<FeaturePoisonInstance> ParseFeaturePoisonCsv(
    std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  absl::StatusOr<size_t> first =
      CheckPreamble(lines, "feature-poison", kFeatureHeader);
  if (!first.ok()) return first.status();
  FeaturePoisonInstance instance;
  for (size_t i = *first; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string_view> f = Fields(lines[i]);
    int64_t point = 0;
    double score = 0, lower = 0, upper = 0;
    if (f.size() != 4 || !ParseNumber(f[0], point) ||
        !ParseNumber(f[1], score) || !ParseNumber(f[2], lower) ||
        !ParseNumber(f[3], upper)) {
      return LineError(line, "expected point_id,score,lower,upper");
    }
    if (point != static_cast<int64_t>(instance.scores.size())) {
      return LineError(line, "point ids must be consecutive from 0");
    }
    instance.scores.push_back(score);
    instance.lower.push_back(lower);
    instance.upper.push_back(upper);
  }
  return instance;
}

std::string FormatFeaturePoisonCsv(const FeaturePoisonInstance& instance) {
  std::string out = Preamble("feature-poison", kFeatureHeader);
  for (size_t i = 0; i < instance.scores.size(); ++i) {
    absl::StrAppend(&out, i, ",", FormatDouble(instance.scores[i]), ",",
                    FormatDouble(instance.lower[i]), ",",
                    FormatDouble(instance.upper[i]), "\n");
  }
  return out;
}

absl::StatusOr<LabelPoisonInstance> ParseLabelPoisonCsv(std::string_view text) {
  const std::vector<std::string_view> lines = Lines(text);
  absl::StatusOr<size_t> first =
      CheckPreamble(lines, "label-poison", "point_id,label,score_0");
  if (!first.ok()) return first.status();
  const size_t columns = Fields(lines[1]).size();
  for (size_t c = 2; c < columns; ++c) {
    if (Fields(lines[1])[c] != absl::StrCat("score_", c - 2)) {
      return LineError(2, "score columns must be score_0, score_1, ...");
    }
  }
  LabelPoisonInstance instance;
  for (size_t i = *first; i < lines.size(); ++i) {
    const int line = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const std::vector<std::string_view> f = Fields(lines[i]);
    int64_t point = 0;
    int label = 0;
    if (f.size() != columns || !ParseNumber(f[0], point) ||
        !ParseNumber(f[1], label)) {
      return LineError(line, "expected point_id,label,score_0,...");
    }
    if (point != static_cast<int64_t>(instance.labels.size())) {
      return LineError(line, "point ids must be consecutive from 0");
    }
    std::vector<double> row(columns - 2);
    for (size_t c = 2; c < columns; ++c) {
      if (!ParseNumber(f[c], row[c - 2])) {
        return LineError(line, "scores must be numbers");
      }
    }
    instance.labels.push_back(label);
    instance.score_matrix.push_back(std::move(row));
  }
  return instance;
}

std::string FormatLabelPoisonCsv(const LabelPoisonInstance& instance) {
  std::string header = "point_id,label";
  const size_t classes =
      instance.score_matrix.empty() ? 0 : instance.score_matrix[0].size();
  for (size_t c = 0; c < classes; ++c) absl::StrAppend(&header, ",score_", c);
  std::string out = Preamble("label-poison", header);
  for (size_t i = 0; i < instance.labels.size(); ++i) {
    absl::StrAppend(&out, i, ",", instance.labels[i]);
    for (double s : instance.score_matrix[i]) {
      absl::StrAppend(&out, ",", FormatDouble(s));
    }
    out += "\n";
  }
  return out;
}

}  // namespace robust_cp
