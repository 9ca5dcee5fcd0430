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

#ifndef SDNEVB_REFINEMENT_HPP_
#define SDNEVB_REFINEMENT_HPP_

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sdnevb/checker.hpp"
#include "sdnevb/events.hpp"

namespace sdnevb {

// Maps states and event names of one level onto the level below it.
struct ProjectionMap {
  Level from = Level::L1;  // concrete level
  Level to = Level::L0;    // abstract level
  std::function<GlobalState(const GlobalState&)> state;
  std::map<std::string, std::string> events;
};

struct RefinementError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The projection from `from` to the level below: queued outputs collapse to
// destination-switch sets when leaving L1, priorities are stripped when
// leaving L2, and L3 only strengthened guards, so its projection is the
// identity. Throws LevelError for L0.
ProjectionMap projection(Level from, const Context& ctx);

GlobalState project_state(const ProjectionMap& pi, const GlobalState& state);

// Chains adjacent projections from `from` down to `to`.
GlobalState project_to(Level from, Level to, const Context& ctx,
                       const GlobalState& state);

// Projects every step. A step whose event has no abstract counterpart must
// not move the projected state (it stutters and is dropped); anything else
// throws RefinementError.
Trace project_trace(const ProjectionMap& pi, const Trace& trace);

struct RefinementIssue {
  // "guard-not-implied": the abstract guard rejects a step the concrete
  // machine takes. "unsimulated-edge": the abstract action lands elsewhere
  // than the projected successor.
  std::string kind;
  EventInstance instance;
  int edge = -1;  // index into the concrete graph's edge list
  std::string detail;
};

struct RefinementReport {
  bool ok = true;
  Level from = Level::L1;
  Level to = Level::L0;
  std::size_t checkedStates = 0;
  std::size_t checkedEdges = 0;
  std::vector<RefinementIssue> issues;
};

// Edge-wise simulation over the reachable concrete graph: every concrete
// step, projected, must be a step the abstract machine takes from the
// projected source, and the abstract guard must accept it.
RefinementReport check_refinement(const StateGraph& concrete, Level from,
                                  const Context& ctx);

}  // namespace sdnevb

#endif  // SDNEVB_REFINEMENT_HPP_
