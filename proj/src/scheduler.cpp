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

#include "sdnevb/scheduler.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>

namespace sdnevb {

PriorityOrder l3_priority_order() {
  PriorityOrder order;
  order.pairs = {
      {"sw_newFTentry", "sw_sendPckt2sw"},
      {"sw_sndPk2ctrl", "sw_sendPckt2sw"},
      {"sw_sndPk2ctrl", "sw_newFTentry"},
      {"sw_sendPckt2sw", "sw_delFTentry"},
      {"sw_newFTentry", "sw_barrierRp"},
      {"sw_modFTentry", "sw_barrierRp"},
      {"sw_delFTentry", "sw_barrierRp"},
      {"sw_handlePkOut", "sw_barrierRp"},
      {"sw_statusRp", "sw_barrierRp"},
  };
  return order;
}

std::map<std::string, std::set<std::string>> transitive_closure(
    const PriorityOrder& order) {
  std::map<std::string, std::set<std::string>> above;
  std::set<std::string> names;
  for (const auto& [lower, higher] : order.pairs) {
    above[lower].insert(higher);
    names.insert(lower);
    names.insert(higher);
  }
  bool grew = true;
  while (grew) {
    grew = false;
    for (const auto& name : names) {
      auto it = above.find(name);
      if (it == above.end()) continue;
      std::set<std::string> reach = it->second;
      for (const auto& mid : it->second) {
        auto jt = above.find(mid);
        if (jt == above.end()) continue;
        reach.insert(jt->second.begin(), jt->second.end());
      }
      if (reach.size() != it->second.size()) {
        it->second = std::move(reach);
        grew = true;
      }
    }
  }
  for (const auto& [name, reach] : above) {
    if (reach.count(name) > 0) {
      throw CyclicOrder("priority order has a cycle through " + name);
    }
  }
  return above;
}

namespace {

std::optional<SwitchId> instance_switch(const EventInstance& instance) {
  if (instance.arguments.empty()) return std::nullopt;
  const Value& first = instance.arguments.front();
  if (first.sort != Sort::Switch) return std::nullopt;
  return first.as_switch();
}

}  // namespace

std::set<EventInstance> filter_priority(const std::set<EventInstance>& enabled,
                                        const PriorityOrder& order) {
  const auto above = transitive_closure(order);
  std::map<SwitchId, std::set<std::string>> names_on;
  for (const auto& instance : enabled) {
    if (auto sw = instance_switch(instance)) {
      names_on[*sw].insert(instance.eventName);
    }
  }
  std::set<EventInstance> kept;
  for (const auto& instance : enabled) {
    auto sw = instance_switch(instance);
    bool outranked = false;
    if (sw) {
      auto it = above.find(instance.eventName);
      if (it != above.end()) {
        for (const auto& higher : it->second) {
          if (names_on[*sw].count(higher) > 0) {
            outranked = true;
            break;
          }
        }
      }
    }
    if (!outranked) kept.insert(instance);
  }
  return kept;
}

std::vector<Message> message_dequeue_order(const std::vector<Message>& msgs) {
  for (const auto& msg : msgs) {
    if (!msg.priority.has_value()) {
      throw MissingPriority("message " + to_string(msg.id) +
                            " carries no priority");
    }
  }
  std::vector<Message> ordered = msgs;
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const Message& a, const Message& b) {
                     if (*a.priority != *b.priority) {
                       return *a.priority > *b.priority;
                     }
                     return a.id < b.id;
                   });
  return ordered;
}

namespace {

std::uint64_t policy_seed(const SchedulingPolicy& policy) {
  if (const auto* seeded = std::get_if<SeededRandom>(&policy)) {
    return seeded->seed;
  }
  if (const auto* ranked = std::get_if<PriorityThenSeed>(&policy)) {
    return ranked->seed;
  }
  return 0;
}

// Priority of the incoming message an instance is about to process, if any.
std::optional<int> bound_message_priority(const GlobalState& state,
                                          const EventInstance& instance,
                                          SwitchId sw) {
  auto swIt = state.switches.find(sw);
  if (swIt == state.switches.end()) return std::nullopt;
  for (const Value& arg : instance.arguments) {
    if (arg.sort != Sort::Message) continue;
    MessageId id = arg.as_message();
    if (swIt->second.swIncomingMsg.count(id) == 0) continue;
    auto msgIt = state.messageStore.find(id);
    if (msgIt != state.messageStore.end() && msgIt->second.priority) {
      return msgIt->second.priority;
    }
  }
  return std::nullopt;
}

std::set<EventInstance> prefer_urgent_messages(
    const std::set<EventInstance>& enabled, const GlobalState& state) {
  std::map<SwitchId, int> best;
  std::map<const EventInstance*, std::pair<SwitchId, int>> ranked;
  for (const auto& instance : enabled) {
    auto sw = instance_switch(instance);
    if (!sw) continue;
    auto prio = bound_message_priority(state, instance, *sw);
    if (!prio) continue;
    ranked[&instance] = {*sw, *prio};
    auto [it, inserted] = best.emplace(*sw, *prio);
    if (!inserted && *prio > it->second) it->second = *prio;
  }
  std::set<EventInstance> kept;
  for (const auto& instance : enabled) {
    auto it = ranked.find(&instance);
    if (it == ranked.end() || it->second.second == best[it->second.first]) {
      kept.insert(instance);
    }
  }
  return kept;
}

}  // namespace

Scheduler::Scheduler(SchedulingPolicy policy)
    : policy_(policy), rng_(policy_seed(policy)) {}

std::optional<EventInstance> Scheduler::pick(
    const std::set<EventInstance>& enabled, const GlobalState& state) {
  if (enabled.empty()) {
    throw EmptyChoice("no enabled instance to pick from");
  }
  if (std::holds_alternative<Exhaustive>(policy_)) {
    return std::nullopt;
  }
  std::set<EventInstance> pool = enabled;
  if (std::holds_alternative<PriorityThenSeed>(policy_)) {
    pool = filter_priority(pool, l3_priority_order());
    pool = prefer_urgent_messages(pool, state);
  }
  // Set iteration is already canonical: event name, then argument order.
  std::vector<EventInstance> candidates(pool.begin(), pool.end());
  std::uniform_int_distribution<std::size_t> dist(0, candidates.size() - 1);
  return candidates[dist(rng_)];
}

}  // namespace sdnevb
