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

#include "robust_cp/io/config.h"

#include <charconv>
#include <cmath>

#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"

namespace robust_cp {
namespace {

// The system abseil keeps its own string_view type, so splitting and
// stripping stay on std::string_view.
std::string_view Strip(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const size_t begin = s.find_first_not_of(kSpace);
  if (begin == std::string_view::npos) return {};
  return s.substr(begin, s.find_last_not_of(kSpace) - begin + 1);
}

std::vector<std::string_view> Split(std::string_view s, char delimiter) {
  std::vector<std::string_view> out;
  size_t start = 0;
  for (size_t pos; (pos = s.find(delimiter, start)) != std::string_view::npos;
       start = pos + 1) {
    out.push_back(s.substr(start, pos - start));
  }
  out.push_back(s.substr(start));
  return out;
}

absl::Status Malformed(std::string_view key, std::string_view value,
                       std::string_view type) {
  return absl::InvalidArgumentError(
      absl::StrCat("config key '", std::string(key), "': '", std::string(value),
                   "' is not ", std::string(type)));
}

std::vector<std::string> SplitList(std::string_view value) {
  std::vector<std::string> out;
  if (Strip(value).empty()) return out;
  for (std::string_view part : Split(value, ',')) {
    out.emplace_back(Strip(part));
  }
  return out;
}

}  // namespace

absl::StatusOr<KeyValueConfig> KeyValueConfig::Parse(std::string_view text) {
  KeyValueConfig config;
  int line_number = 0;
  for (std::string_view line : Split(text, '\n')) {
    ++line_number;
    const size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = Strip(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": expected key = value"));
    }
    std::string key(Strip(line.substr(0, eq)));
    std::string value(Strip(line.substr(eq + 1)));
    if (key.empty()) {
      return absl::InvalidArgumentError(
          absl::StrCat("config line ", line_number, ": empty key"));
    }
    if (config.Has(key)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "config line ", line_number, ": duplicate key '", key, "'"));
    }
    config.entries_.emplace(std::move(key), std::move(value));
  }
  return config;
}

absl::Status KeyValueConfig::ApplyOverride(std::string_view assignment) {
  const size_t eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    return absl::InvalidArgumentError(absl::StrCat(
        "override '", std::string(assignment), "' is not key=value"));
  }
  std::string key(Strip(assignment.substr(0, eq)));
  if (key.empty()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "override '", std::string(assignment), "' has an empty key"));
  }
  Set(std::move(key), std::string(Strip(assignment.substr(eq + 1))));
  return absl::OkStatus();
}

void KeyValueConfig::Set(std::string key, std::string value) {
  entries_.insert_or_assign(std::move(key), std::move(value));
}

bool KeyValueConfig::Has(std::string_view key) const {
  return entries_.find(key) != entries_.end();
}

std::optional<std::string> KeyValueConfig::Get(std::string_view key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

absl::StatusOr<std::string> KeyValueConfig::GetString(
    std::string_view key, std::string_view fallback) const {
  std::optional<std::string> value = Get(key);
  return value.has_value() ? *value : std::string(fallback);
}

absl::StatusOr<double> KeyValueConfig::GetDouble(std::string_view key,
                                                 double fallback) const {
  std::optional<std::string> value = Get(key);
  if (!value.has_value()) return fallback;
  double out;
  if (!absl::SimpleAtod(*value, &out) || std::isnan(out)) {
    return Malformed(key, *value, "a number");
  }
  return out;
}

absl::StatusOr<int64_t> KeyValueConfig::GetInt(std::string_view key,
                                               int64_t fallback) const {
  std::optional<std::string> value = Get(key);
  if (!value.has_value()) return fallback;
  int64_t out;
  if (!absl::SimpleAtoi(*value, &out)) {
    return Malformed(key, *value, "an integer");
  }
  return out;
}

absl::StatusOr<bool> KeyValueConfig::GetBool(std::string_view key,
                                             bool fallback) const {
  std::optional<std::string> value = Get(key);
  if (!value.has_value()) return fallback;
  bool out;
  if (!absl::SimpleAtob(*value, &out)) return Malformed(key, *value, "a bool");
  return out;
}

absl::StatusOr<std::vector<double>> KeyValueConfig::GetDoubleList(
    std::string_view key, std::vector<double> fallback) const {
  std::optional<std::string> value = Get(key);
  if (!value.has_value()) return fallback;
  std::vector<double> out;
  for (const std::string& part : SplitList(*value)) {
    double v;
    if (!absl::SimpleAtod(part, &v) || std::isnan(v)) {
      return Malformed(key, *value, "a list of numbers");
    }
    out.push_back(v);
  }
  return out;
}

absl::StatusOr<std::vector<int64_t>> KeyValueConfig::GetIntList(
    std::string_view key, std::vector<int64_t> fallback) const {
  std::optional<std::string> value = Get(key);
  if (!value.has_value()) return fallback;
  std::vector<int64_t> out;
  for (const std::string& part : SplitList(*value)) {
    int64_t v;
    if (!absl::SimpleAtoi(part, &v)) {
      return Malformed(key, *value, "a list of integers");
    }
    out.push_back(v);
  }
  return out;
}

std::vector<std::string> KeyValueConfig::GetStringList(
    std::string_view key) const {
  std::optional<std::string> value = Get(key);
  return value.has_value() ? SplitList(*value) : std::vector<std::string>{};
}

absl::Status KeyValueConfig::CheckKnownKeys(
    const std::set<std::string>& known) const {
  for (const auto& [key, value] : entries_) {
    if (!known.contains(key)) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown config key '", key, "'"));
    }
  }
  return absl::OkStatus();
}

std::string KeyValueConfig::Serialize() const {
  std::string out;
  for (const auto& [key, value] : entries_) {
    absl::StrAppend(&out, key, " = ", value, "\n");
  }
  return out;
}

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

}  // namespace robust_cp
