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

// Command-line entry point. Every subcommand reads a key=value config, then
// applies --set overrides, then per-key flags.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "absl/strings/numbers.h"
#include "absl/strings/str_cat.h"
#include "robust_cp/io/config.h"
#include "robust_cp/io/files.h"
#include "tools/commands.h"

namespace {

using robust_cp::KeyValueConfig;
using robust_cp::cli::Command;
using robust_cp::cli::KeySpec;

struct Invocation {
  std::string config_path;
  std::vector<std::string> sets;
  std::string out = ".";
  int workers = 0;
  std::map<std::string, std::string> flags;
};

absl::StatusOr<int> ResolveWorkers(int flag) {
  if (flag > 0) return flag;
  if (const char* env = std::getenv("ROBUST_CP_WORKERS"); env != nullptr) {
    int value = 0;
    if (!absl::SimpleAtoi(std::string(env), &value) || value < 1) {
      return absl::InvalidArgumentError(absl::StrCat(
          "ROBUST_CP_WORKERS='", env, "' is not a positive integer"));
    }
    return value;
  }
  return 1;
}

absl::StatusOr<KeyValueConfig> ResolveConfig(const Command& command,
                                             const Invocation& inv) {
  KeyValueConfig config;
  if (!inv.config_path.empty()) {
    absl::StatusOr<std::string> text = robust_cp::ReadFile(inv.config_path);
    if (!text.ok()) return text.status();
    absl::StatusOr<KeyValueConfig> parsed = KeyValueConfig::Parse(*text);
    if (!parsed.ok()) {
      return absl::Status(
          parsed.status().code(),
          absl::StrCat(inv.config_path, ": ", parsed.status().message()));
    }
    config = *std::move(parsed);
  }
  for (const std::string& assignment : inv.sets) {
    if (absl::Status s = config.ApplyOverride(assignment); !s.ok()) return s;
  }
  for (const auto& [key, value] : inv.flags) config.Set(key, value);

  std::set<std::string> known;
  for (const KeySpec& key : command.keys) known.insert(key.name);
  if (absl::Status s = config.CheckKnownKeys(known); !s.ok()) return s;
  for (const KeySpec& key : command.keys) {
    if (config.Has(key.name)) continue;
    if (key.required) {
      return absl::InvalidArgumentError(
          absl::StrCat("missing required key '", key.name, "'"));
    }
    config.Set(key.name, key.fallback);
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust conformal prediction under evasion and poisoning"};
  app.require_subcommand(1);
  std::map<std::string, Invocation> invocations;
  for (const Command& command : robust_cp::cli::Commands()) {
    Invocation& inv = invocations[command.name];
    CLI::App* sub = app.add_subcommand(command.name, command.description);
    sub->add_option("--config", inv.config_path, "key=value config file");
    sub->add_option("--set", inv.sets, "KEY=VALUE override (repeatable)");
    sub->add_option("--out", inv.out, "output directory")
        ->capture_default_str();
    sub->add_option("--workers", inv.workers,
                    "worker threads (default: ROBUST_CP_WORKERS or 1)");
    for (const KeySpec& key : command.keys) {
      std::string help = key.help;
      if (key.required) {
        help += " (required)";
      } else if (!key.fallback.empty()) {
        help += absl::StrCat(" [", key.fallback, "]");
      }
      sub->add_option_function<std::string>(
          "--" + key.name,
          [&inv, name = key.name](const std::string& value) {
            inv.flags[name] = value;
          },
          help);
    }
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Usage errors share the input-error exit code; --help exits 0.
    return app.exit(e) == 0 ? 0 : 2;
  }

  for (const Command& command : robust_cp::cli::Commands()) {
    if (!app.got_subcommand(command.name)) continue;
    const Invocation& inv = invocations[command.name];
    absl::StatusOr<int> workers = ResolveWorkers(inv.workers);
    absl::StatusOr<KeyValueConfig> config =
        workers.ok() ? ResolveConfig(command, inv)
                     : absl::StatusOr<KeyValueConfig>(workers.status());
    absl::Status status = config.status();
    if (status.ok()) {
      std::error_code ec;
      std::filesystem::create_directories(inv.out, ec);
      if (ec) {
        status = absl::PermissionDeniedError(
            absl::StrCat("cannot create ", inv.out, ": ", ec.message()));
      }
    }
    if (status.ok()) status = command.run(*config, inv.out, *workers);
    if (!status.ok()) {
      std::cerr << "robust_cp " << command.name << ": " << status.message()
                << "\n";
    }
    return robust_cp::cli::ExitCodeFor(status);
  }
  return 2;
}
