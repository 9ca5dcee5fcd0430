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

#ifndef SDNEVB_SCENARIO_HPP_
#define SDNEVB_SCENARIO_HPP_

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "sdnevb/events.hpp"
#include "sdnevb/state.hpp"

namespace sdnevb {

// A network to explore: initial state plus the constants the events need.
//
// Text format, line oriented, `#` starts a comment:
//
//   [switches]            one switch per line
//   s1 active
//   s2 inactive
//
//   [ports]               physical wiring, port -> switch behind it
//   a1 -> s2
//
//   [entries]             preinstalled rules; [field=h..] are extra matches
//   e1 @ s1 : h1 -> {a1}
//   e2 @ s1 : h2 [ipDst=h5] -> {a1, a2}
//
//   [packets]             known packets; fields default to h0
//   p1 : h1
//   p2 : h2 [ipDst=h5]
//
//   [pools]               injectable packets and mintable fresh ids
//   packets  = p1 p2
//   messages = m1 m2 m3 m4
//   entries  = e9
//
//   [orders]              pre-queued controller orders, FIFO in file order
//   add  @ s2 : e5 h1 -> {a2}
//   modf @ s1 : e1 h1 -> {a3}
//   del  @ s1 : e1
//
//   [run]                 catalogue constants
//   default-mint-port = a1
//   branch-fresh-ids  = false
//   barrier-asks      = s1 s1
//   status-asks       = s2
struct Scenario {
  std::string name;
  GlobalState initial;
  Context ctx;
  // Every header / port mentioned anywhere; finite universes for the
  // over-approximated environment events used by decomposition.
  std::vector<Header> headerUniverse;
  std::vector<PortId> portUniverse;
};

struct ScenarioParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A structurally well-formed scenario that breaks a consistency rule; the
// message names the rule.
struct ScenarioValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Parses and validates. Throws ScenarioParseError with a line number, or
// ScenarioValidationError.
Scenario parse_scenario(std::string_view text, std::string name);

// Reads the file; the scenario is named by the file's stem.
Scenario load_scenario(const std::filesystem::path& file);

// Resolves `name` against the directory list in the SDN_EVB_SCENARIOS
// environment variable (colon or semicolon separated), then the working
// directory. Accepts a bare name, `name.scn`, or a path.
Scenario find_scenario(const std::string& name);

void validate_scenario(const Scenario& scenario);

}  // namespace sdnevb

#endif  // SDNEVB_SCENARIO_HPP_
