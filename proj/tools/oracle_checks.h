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

// Library-versus-oracle comparisons shared by `robust_cp oracle-check` and the
// acceptance suite. Oracles come from tests/oracles.h and share no code with
// the routines under test.

#ifndef ROBUST_CP_TOOLS_ORACLE_CHECKS_H_
#define ROBUST_CP_TOOLS_ORACLE_CHECKS_H_

#include <cstdint>
#include <string>
#include <vector>

namespace robust_cp {

struct OracleCheckResult {
  std::string name;
  int64_t instances = 0;
  double max_error = 0.0;
  double tolerance = 0.0;
  // Instances the library refused or failed on; any count fails the check.
  int64_t errors = 0;
  bool passed() const { return errors == 0 && max_error <= tolerance; }
};

// Mean bounds against a 50-digit normal CDF (tolerance 1e-9) and the exact
// r = 0 identities (tolerance 0).
std::vector<OracleCheckResult> CheckGaussianClosedForms(uint64_t seed,
                                                        int instances);

// Region tables for every r_a + r_d <= max_total at (0.2, 0.2) and
// (0.01, 0.6) against enumeration of all 2^(r_a + r_d) flip patterns. Masses
// are compared absolutely, ratios relative to their magnitude.
OracleCheckResult CheckRegionTables(int max_total);

// Greedy sparse mean and per-bin CDF bounds against a vertex-enumeration LP on
// random instances with r_a + r_d <= 4.
std::vector<OracleCheckResult> CheckGreedyAgainstLp(uint64_t seed,
                                                    int instances);

// Rank-search poisoning solvers against brute force, both objectives, with
// witness replay. Exact equality is required.
std::vector<OracleCheckResult> CheckPoisoningAgainstBruteForce(uint64_t seed,
                                                               int instances);

}  // namespace robust_cp

#endif  // ROBUST_CP_TOOLS_ORACLE_CHECKS_H_
