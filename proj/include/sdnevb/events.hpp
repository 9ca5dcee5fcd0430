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

#ifndef SDNEVB_EVENTS_HPP_
#define SDNEVB_EVENTS_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdnevb/kernel.hpp"

namespace sdnevb {

enum class EventFamily { Switch, Controller };

std::string to_string(EventFamily family);

// Scenario-derived constants the event guards and actions close over.
struct Context {
  // Physical wiring: which switch sits behind each output port.
  std::map<PortId, SwitchId> portToSwitch;
  // Output port written into entries the controller mints on its own.
  PortId defaultMintPort{1};
  // When true, fresh-id parameters range over the whole pool instead of
  // binding only the smallest id. Ids are interchangeable, so the default
  // explores one canonical representative per mint.
  bool branchFreshIds = false;
};

struct CatalogueRow {
  EventDef event;
  EventFamily family = EventFamily::Switch;
  Level introducedAt = Level::L0;
  // Name of the event this one refines in the previous level, when the
  // catalogue is built for L1 or deeper.
  std::optional<std::string> refines;
  // State components the action may write, named as in state_fields().
  std::set<std::string> writeSet;
  // True only for the synthesized environment mirrors used by decomposition.
  bool external = false;
};

struct LevelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The machine: thirteen switch events followed by eleven controller events.
// Guards and actions capture `level` and `ctx` by value.
std::vector<CatalogueRow> event_catalog(Level level, const Context& ctx);

std::vector<EventDef> event_defs(const std::vector<CatalogueRow>& rows);

const CatalogueRow& catalogue_row(const std::vector<CatalogueRow>& rows,
                                  const std::string& name);

// Concrete-to-abstract event name map for `level` against its predecessor.
// Identity on all names here, since refinement only superposes state and
// strengthens guards. Throws LevelError for L0, which refines nothing.
std::map<std::string, std::string> refines_map(Level level);

const std::vector<std::string>& switch_event_names();
const std::vector<std::string>& controller_event_names();

// Wire-priority of a message kind, used from L2 on. Higher is more urgent.
int kind_priority(MessageKind kind);

}  // namespace sdnevb

#endif  // SDNEVB_EVENTS_HPP_
