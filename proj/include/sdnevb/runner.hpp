/*
 * Copyright (c) 2026, the sdn-evb authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SDNEVB_RUNNER_HPP_
#define SDNEVB_RUNNER_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "sdnevb/checker.hpp"
#include "sdnevb/ids.hpp"

namespace sdnevb {

// One named formula from a formula file. Lines look like
//   name: G(e(ctl_havePacket) => F(e(ctl_emitPkt)))
// with '#' comments. A leading "policy " keyword marks a property that is
// only meaningful for a concrete scheduling policy; check mode reports it on
// a simulated run and never folds it into the verdict.
struct FormulaSpec {
  std::string name;
  std::string text;
  bool policyOnly = false;

  bool operator==(const FormulaSpec&) const = default;
};

class FormulaFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::vector<FormulaSpec> parse_formula_file(const std::string& text);
std::vector<FormulaSpec> load_formulas(const std::string& path);

struct RunnerOptions {
  std::string scenario;  // name resolved via SDN_EVB_SCENARIOS, or a path
  Level level = Level::L3;
  ExploreOptions bounds;
  std::optional<std::string> formulasPath;
  // "exhaustive", "seeded-random" or "priority-then-seed".
  std::optional<std::string> policy;
  std::uint64_t seed = 0;
  int steps = 64;
};

// Exit codes shared by every mode: 0 all checks passed, 1 a property
// failed, 2 bad usage or unreadable input. Inconclusive bounded results
// print as bound-exceeded and do not fail the run.
inline constexpr int kExitOk = 0;
inline constexpr int kExitPropertyFailure = 1;
inline constexpr int kExitUsage = 2;

int run_simulate(const RunnerOptions& options, std::ostream& out,
                 std::ostream& err);
int run_explore(const RunnerOptions& options, std::ostream& out,
                std::ostream& err);
int run_check(const RunnerOptions& options, std::ostream& out,
              std::ostream& err);
int run_refine_check(const RunnerOptions& options, std::ostream& out,
                     std::ostream& err);
int run_decompose_check(const RunnerOptions& options, std::ostream& out,
                        std::ostream& err);

// Dispatches on the mode name; unknown modes are usage errors.
int run_mode(const std::string& mode, const RunnerOptions& options,
             std::ostream& out, std::ostream& err);

}  // namespace sdnevb

#endif  // SDNEVB_RUNNER_HPP_
