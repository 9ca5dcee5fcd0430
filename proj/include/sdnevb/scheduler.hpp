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

#ifndef SDNEVB_SCHEDULER_HPP_
#define SDNEVB_SCHEDULER_HPP_

#include <cstdint>
#include <map>
#include <random>
#include <variant>
#include <vector>

#include "sdnevb/kernel.hpp"

namespace sdnevb {

// Switch-local scheduling order. A pair (lower, higher) means: while an
// instance of `higher` is enabled on a switch, no instance of `lower` fires
// on that same switch. Must be irreflexive and acyclic.
struct PriorityOrder {
  std::vector<std::pair<std::string, std::string>> pairs;
};

// The order enforced by the L3 guards: installing a new entry and reporting
// an unmatched packet both wait for pending forwards; forwarding waits for a
// pending Del; every message-processing event waits for a pending Barrier.
PriorityOrder l3_priority_order();

struct CyclicOrder : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyChoice : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct MissingPriority : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// lower -> set of strictly-higher event names. Throws CyclicOrder.
std::map<std::string, std::set<std::string>> transitive_closure(
    const PriorityOrder& order);

// Removes every instance outranked (via the transitive closure) by some
// enabled instance on the same switch. Instances whose first argument is not
// a switch pass through untouched. Never empties a non-empty per-switch set.
std::set<EventInstance> filter_priority(const std::set<EventInstance>& enabled,
                                        const PriorityOrder& order);

struct Exhaustive {};
struct SeededRandom {
  std::uint64_t seed = 0;
};
struct PriorityThenSeed {
  std::uint64_t seed = 0;
};

using SchedulingPolicy = std::variant<Exhaustive, SeededRandom, PriorityThenSeed>;

// Sorts by descending priority, ties by ascending message id. Every message
// must carry a priority (they all do from L2 on); throws MissingPriority.
std::vector<Message> message_dequeue_order(const std::vector<Message>& msgs);

// One scheduler owns the pseudo-random stream of one run, so identical seeds
// replay identical choices.
class Scheduler {
 public:
  explicit Scheduler(SchedulingPolicy policy);

  // Chooses the next instance. Returns nullopt when the policy is Exhaustive
  // (the caller must branch over the whole set). Throws EmptyChoice on an
  // empty set.
  //
  // SeededRandom draws uniformly over the canonically ordered candidates.
  // PriorityThenSeed first applies filter_priority with the L3 order, then
  // keeps only the instances bound to the highest-priority incoming message
  // per switch, and draws over what is left; candidates are ranked by event
  // name then argument order before the draw.
  std::optional<EventInstance> pick(const std::set<EventInstance>& enabled,
                                    const GlobalState& state);

  const SchedulingPolicy& policy() const { return policy_; }

 private:
  SchedulingPolicy policy_;
  std::mt19937_64 rng_;
};

}  // namespace sdnevb

#endif  // SDNEVB_SCHEDULER_HPP_
