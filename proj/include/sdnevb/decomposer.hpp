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

#ifndef SDNEVB_DECOMPOSER_HPP_
#define SDNEVB_DECOMPOSER_HPP_

#include <set>
#include <string>
#include <vector>

#include "sdnevb/checker.hpp"
#include "sdnevb/events.hpp"

namespace sdnevb {

// Finite universes the synthesized environment events range over, gathered
// from the scenario. They stand in for the peer state a component cannot see.
struct ExternalUniverse {
  std::vector<Header> headers;
  std::vector<PortId> ports;
  std::vector<EntryId> entryIds;  // ids the peer could send orders about
};

// One half of the split machine. Components keep the whole state type; the
// partition says which components they may write.
struct Component {
  std::string name;
  std::vector<CatalogueRow> rows;  // own events plus external mirrors
  std::set<std::string> ownEvents;
  std::set<std::string> externalEvents;
  std::set<std::string> privateVariables;
};

struct Decomposition {
  Component controller;
  Component switches;
  std::set<std::string> sharedVariables;
  // Id stores and pools: readable and writable from both sides, exempt from
  // the write discipline because they only resolve ids to payloads.
  std::set<std::string> contextVariables;
};

// Splits the machine by family: the controller keeps the ctl_ events, the
// switch component keeps the sw_ events. Every peer event that writes a
// shared variable is mirrored by an external event replaying exactly those
// shared writes, with parameters over-approximated from the universe.
Decomposition decompose(Level level, const Context& ctx,
                        const ExternalUniverse& universe);

struct RecompositionReport {
  bool ok = true;
  std::vector<std::string> issues;
  std::size_t composedStates = 0;
  std::size_t recomposedStates = 0;
  std::size_t controllerStates = 0;
  std::size_t switchesStates = 0;
};

// Validates a decomposition against the composed machine:
//  - own events partition the full catalogue, and each side keeps its family;
//  - replaying the merged own events from `initial` rebuilds a graph
//    canonically equal to the composed machine's (under `options` bounds);
//  - write discipline, declared and empirical: external events change only
//    shared or context variables and own events stay out of the peer's
//    private ones, verified by replaying every component event from a
//    stride of composed states and diffing what it touched;
//  - a bounded standalone run of each component (its events plus the
//    over-approximated environment) keeps the safety invariants that
//    mention only variables the component can see. When `options` leaves
//    depth or branch unbounded, the standalone runs use depth 3 and branch
//    24; the arbitrary-environment state space is not finitely explorable.
RecompositionReport check_recomposition(const Decomposition& parts,
                                        Level level, const Context& ctx,
                                        const GlobalState& initial,
                                        const ExploreOptions& options = {});

}  // namespace sdnevb

#endif  // SDNEVB_DECOMPOSER_HPP_
