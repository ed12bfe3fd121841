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

// Flat key = value configuration text.
//
//   # comment
//   alpha = 0.1
//   radii = 0.25, 0.5, 1
//
// Keys are unique; later overrides replace earlier values. Serialization is
// sorted by key so a resolved config is byte-stable.

#ifndef ROBUST_CP_IO_CONFIG_H_
#define ROBUST_CP_IO_CONFIG_H_

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace robust_cp {

class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  // Duplicate keys or lines without '=' are InvalidArgument.
  static absl::StatusOr<KeyValueConfig> Parse(std::string_view text);

  // "key=value"; replaces any existing value.
  absl::Status ApplyOverride(std::string_view assignment);

  void Set(std::string key, std::string value);
  bool Has(std::string_view key) const;
  std::optional<std::string> Get(std::string_view key) const;

  // Typed getters; a present but malformed value is InvalidArgument.
  absl::StatusOr<std::string> GetString(std::string_view key,
                                        std::string_view fallback) const;
  absl::StatusOr<double> GetDouble(std::string_view key, double fallback) const;
  absl::StatusOr<int64_t> GetInt(std::string_view key, int64_t fallback) const;
  absl::StatusOr<bool> GetBool(std::string_view key, bool fallback) const;
  // Comma-separated; an empty value is an empty list.
  absl::StatusOr<std::vector<double>> GetDoubleList(
      std::string_view key, std::vector<double> fallback) const;
  absl::StatusOr<std::vector<int64_t>> GetIntList(
      std::string_view key, std::vector<int64_t> fallback) const;
  std::vector<std::string> GetStringList(std::string_view key) const;

  // InvalidArgument naming the first key not in `known`.
  absl::Status CheckKnownKeys(const std::set<std::string>& known) const;

  std::string Serialize() const;
  const std::map<std::string, std::string, std::less<>>& entries() const {
    return entries_;
  }

 private:
  std::map<std::string, std::string, std::less<>> entries_;
};

// Shortest round-tripping decimal form of `value`.
std::string FormatDouble(double value);

}  // namespace robust_cp

#endif  // ROBUST_CP_IO_CONFIG_H_
