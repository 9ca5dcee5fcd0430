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

#ifndef SDNEVB_CHECKER_HPP_
#define SDNEVB_CHECKER_HPP_

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sdnevb/kernel.hpp"
#include "sdnevb/ltl.hpp"

namespace sdnevb {

struct ExploreOptions {
  // Nodes at this depth are not expanded (-1 = unbounded).
  int maxDepth = -1;
  // At most this many successors per node, in canonical instance order
  // (-1 = all).
  int maxBranch = -1;
};

// Breadth-first reachability graph. Node 0 is the initial state; node ids
// follow discovery order, so ids are sorted by depth.
struct StateGraph {
  struct Edge {
    int from = 0;
    EventInstance label;
    int to = 0;
  };

  std::vector<GlobalState> states;
  std::vector<std::string> digests;
  std::vector<Edge> edges;
  std::vector<std::vector<int>> outEdges;  // node -> edge indices
  std::vector<int> depth;
  std::vector<int> parent;      // BFS tree parent node, -1 at the root
  std::vector<int> parentEdge;  // edge into a node from its parent, -1 at root
  // Nodes whose successors were cut off by a bound. Disjoint from deadlocks.
  std::set<int> truncated;
  // Nodes with no enabled instance at all.
  std::vector<int> deadlocks;

  bool complete() const { return truncated.empty(); }

  // Path from the initial state to `node` along BFS tree edges.
  Trace trace_to(int node) const;
};

// Deterministic exploration: equal inputs produce equal graphs, whatever the
// SDN_EVB_WORKERS thread count says.
StateGraph explore(const GlobalState& initial,
                   const std::vector<EventDef>& catalogue,
                   const ExploreOptions& options = {});

// A state predicate expected to hold everywhere, tagged with the state
// components it reads so it can be projected onto decomposed components.
struct Invariant {
  std::string name;
  std::set<std::string> fields;
  // Empty result = holds; otherwise a short description of the offence.
  std::function<std::optional<std::string>(const GlobalState&)> check;
};

struct InvariantResult {
  std::string invariant;
  bool holds = true;
  // Shortest path to the first offending state.
  std::optional<Trace> counterexample;
  std::optional<std::string> detail;
  // Held, but only the explored part of a truncated graph was checked.
  bool boundedOnly = false;
};

// The safety net: packets on the data channel were sent by a switch, matched
// packets entered through a controller or switch send, packets riding
// downstream messages were sent by the controller, plus the typing rules.
std::vector<Invariant> safety_suite(Level level);

std::vector<InvariantResult> check_invariants(
    const StateGraph& graph, const std::vector<Invariant>& invariants);

enum class LtlVerdict { Holds, Fails, BoundExceeded };

std::string to_string(LtlVerdict verdict);

// A violating run: nodes along the stem, then a cycle returning to
// cycle.front() == prefix.back(). Events are absent on the stutter steps a
// finite run pads its end with.
struct LtlLasso {
  std::vector<int> prefix;
  std::vector<std::optional<EventInstance>> prefixEvents;
  std::vector<int> cycle;
  std::vector<std::optional<EventInstance>> cycleEvents;
};

struct LtlResult {
  LtlVerdict verdict = LtlVerdict::Holds;
  std::string formula;
  std::optional<LtlLasso> counterexample;
};

struct UnknownPredicate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Decides whether every maximal run from the initial state satisfies the
// formula. Finite maximal runs stutter at their final state. Holds needs a
// complete graph; a counterexample never crosses truncated nodes, so Fails is
// trustworthy even on a truncated graph; otherwise BoundExceeded.
LtlResult check_ltl(const StateGraph& graph, const FormulaPtr& formula,
                    const PredMap& preds = {});

// {deadlock}: no instance of the given catalogue is enabled.
PredMap standard_preds(const std::vector<EventDef>& catalogue);

}  // namespace sdnevb

#endif  // SDNEVB_CHECKER_HPP_
