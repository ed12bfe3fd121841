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

#ifndef ROBUST_CP_IO_FILES_H_
#define ROBUST_CP_IO_FILES_H_

#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace robust_cp {

// NotFound when the file cannot be opened.
absl::StatusOr<std::string> ReadFile(const std::string& path);

// Writes `<path>.tmp` and renames it over `path`, so readers never observe a
// partial file. Parent directories are created.
absl::Status WriteFileAtomic(const std::string& path, std::string_view data);

}  // namespace robust_cp

#endif  // ROBUST_CP_IO_FILES_H_
