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

#ifndef ROBUST_CP_TOOLS_COMMANDS_H_
#define ROBUST_CP_TOOLS_COMMANDS_H_

#include <string>
#include <vector>

#include "absl/status/status.h"
#include "robust_cp/io/config.h"

namespace robust_cp::cli {

struct KeySpec {
  std::string name;
  std::string fallback;  // empty means "required" when `required` is set
  std::string help;
  bool required = false;
};

struct Command {
  std::string name;
  std::string description;
  std::vector<KeySpec> keys;
  // `config` holds every key of `keys` with defaults filled in. The command
  // writes its outputs under `out`; `workers` never influences the outputs.
  absl::Status (*run)(const KeyValueConfig& config, const std::string& out,
                      int workers);
};

const std::vector<Command>& Commands();

// 0 ok, 2 input error, 3 invariant failure, 4 configuration conflict.
int ExitCodeFor(const absl::Status& status);

}  // namespace robust_cp::cli

#endif  // ROBUST_CP_TOOLS_COMMANDS_H_
