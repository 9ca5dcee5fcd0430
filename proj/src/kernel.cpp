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

#include "sdnevb/kernel.hpp"

#include <algorithm>

namespace sdnevb {

std::string to_string(Sort sort) {
  switch (sort) {
    case Sort::Switch: return "switch-id";
    case Sort::Packet: return "packet-id";
    case Sort::Message: return "message-id";
    case Sort::Entry: return "entry-id";
    case Sort::Port: return "port-id";
    case Sort::Hdr: return "header";
    case Sort::Token: return "token";
  }
  return "?";
}

namespace {

char sort_prefix(Sort sort) {
  switch (sort) {
    case Sort::Switch: return 's';
    case Sort::Packet: return 'p';
    case Sort::Message: return 'm';
    case Sort::Entry: return 'e';
    case Sort::Port: return 'a';
    case Sort::Hdr: return 'h';
    case Sort::Token: return 't';
  }
  return '?';
}

}  // namespace

std::string to_string(const Value& v) {
  return std::string(1, sort_prefix(v.sort)) + std::to_string(v.raw);
}

std::optional<Value> parse_value(std::string_view text) {
  if (text.size() < 2) return std::nullopt;
  Sort sort;
  switch (text[0]) {
    case 's': sort = Sort::Switch; break;
    case 'p': sort = Sort::Packet; break;
    case 'm': sort = Sort::Message; break;
    case 'e': sort = Sort::Entry; break;
    case 'a': sort = Sort::Port; break;
    case 'h': sort = Sort::Hdr; break;
    case 't': sort = Sort::Token; break;
    default: return std::nullopt;
  }
  std::uint32_t raw = 0;
  for (char c : text.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    raw = raw * 10 + static_cast<std::uint32_t>(c - '0');
  }
  return Value{sort, raw};
}

std::string to_string(const EventInstance& inst) {
  std::string out = inst.eventName;
  out.push_back('(');
  for (std::size_t i = 0; i < inst.arguments.size(); ++i) {
    if (i) out.push_back(',');
    out.append(to_string(inst.arguments[i]));
  }
  out.push_back(')');
  return out;
}

std::optional<EventInstance> parse_instance(std::string_view text) {
  auto open = text.find('(');
  if (open == std::string_view::npos || text.back() != ')') return std::nullopt;
  EventInstance inst;
  inst.eventName = std::string(text.substr(0, open));
  std::string_view args = text.substr(open + 1, text.size() - open - 2);
  while (!args.empty()) {
    auto comma = args.find(',');
    std::string_view piece =
        comma == std::string_view::npos ? args : args.substr(0, comma);
    auto value = parse_value(piece);
    if (!value) return std::nullopt;
    inst.arguments.push_back(*value);
    if (comma == std::string_view::npos) break;
    args = args.substr(comma + 1);
  }
  return inst;
}

std::vector<Value> sort_domain(const GlobalState& state, Sort sort) {
  std::vector<Value> out;
  switch (sort) {
    case Sort::Switch:
      for (const auto& [id, sw] : state.switches) out.push_back(Value::of(id));
      break;
    case Sort::Packet:
      for (const auto& [id, p] : state.packetStore) out.push_back(Value::of(id));
      break;
    case Sort::Message: {
      std::set<MessageId> ids;
      for (const auto& [id, m] : state.messageStore) ids.insert(id);
      for (MessageId id : state.pools.messages) ids.insert(id);
      for (MessageId id : ids) out.push_back(Value::of(id));
      break;
    }
    case Sort::Entry: {
      std::set<EntryId> ids;
      for (const auto& [sid, sw] : state.switches) {
        for (const auto& [id, e] : sw.flowTable) ids.insert(id);
      }
      for (const auto& order : state.controller.pendingOrders) {
        ids.insert(order.entry.id);
      }
      for (EntryId id : state.pools.entries) ids.insert(id);
      for (const auto& [mid, m] : state.messageStore) {
        if (m.entryPayload) ids.insert(m.entryPayload->id);
      }
      for (EntryId id : ids) out.push_back(Value::of(id));
      break;
    }
    case Sort::Port:
    case Sort::Hdr:
    case Sort::Token:
      throw std::logic_error("sort " + to_string(sort) +
                             " requires an explicit domain");
  }
  return out;
}

namespace {

const EventDef* find_event(const std::vector<EventDef>& catalogue,
                           const std::string& name) {
  for (const auto& def : catalogue) {
    if (def.name == name) return &def;
  }
  return nullptr;
}

// Enumerates the cartesian product of the event's parameter domains.
template <typename Fn>
void for_each_binding(const GlobalState& state, const EventDef& def, Fn&& fn) {
  const std::size_t arity = def.parameterSorts.size();
  std::vector<std::vector<Value>> domains(arity);
  for (std::size_t i = 0; i < arity; ++i) {
    if (!def.domains.empty() && !def.domains[i].empty()) {
      domains[i] = def.domains[i];
    } else {
      domains[i] = sort_domain(state, def.parameterSorts[i]);
    }
    if (domains[i].empty()) return;  // no bindings at all
  }
  std::vector<Value> args(arity);
  std::vector<std::size_t> idx(arity, 0);
  while (true) {
    for (std::size_t i = 0; i < arity; ++i) args[i] = domains[i][idx[i]];
    fn(args);
    std::size_t k = arity;
    while (k > 0) {
      --k;
      if (++idx[k] < domains[k].size()) break;
      idx[k] = 0;
      if (k == 0) return;
    }
    if (arity == 0) return;
  }
}

}  // namespace

std::set<EventInstance> enabled_instances(
    const GlobalState& state, const std::vector<EventDef>& catalogue) {
  std::set<EventInstance> out;
  for (const auto& def : catalogue) {
    for_each_binding(state, def, [&](const std::vector<Value>& args) {
      if (def.guard(state, args)) {
        out.insert(EventInstance{def.name, args});
      }
    });
  }
  return out;
}

GlobalState apply(const GlobalState& state, const EventInstance& instance,
                  const std::vector<EventDef>& catalogue) {
  const EventDef* def = find_event(catalogue, instance.eventName);
  if (!def) throw UnknownEvent("unknown event: " + instance.eventName);
  if (instance.arguments.size() != def->parameterSorts.size()) {
    throw ArityMismatch("event " + instance.eventName + " expects " +
                        std::to_string(def->parameterSorts.size()) +
                        " arguments, got " +
                        std::to_string(instance.arguments.size()));
  }
  for (std::size_t i = 0; i < instance.arguments.size(); ++i) {
    if (instance.arguments[i].sort != def->parameterSorts[i]) {
      throw ArityMismatch("event " + instance.eventName + " argument " +
                          std::to_string(i) + " has sort " +
                          to_string(instance.arguments[i].sort) +
                          ", expected " + to_string(def->parameterSorts[i]));
    }
  }
  if (!def->guard(state, instance.arguments)) {
    throw GuardViolation("guard fails for " + to_string(instance));
  }
  return def->action(state, instance.arguments);
}

bool detect_deadlock(const GlobalState& state,
                     const std::vector<EventDef>& catalogue) {
  for (const auto& def : catalogue) {
    bool found = false;
    for_each_binding(state, def, [&](const std::vector<Value>& args) {
      if (!found && def.guard(state, args)) found = true;
    });
    if (found) return false;
  }
  return true;
}

bool validate_trace(const Trace& trace, const std::vector<EventDef>& catalogue) {
  GlobalState current = trace.initial;
  for (const auto& step : trace.steps) {
    GlobalState next;
    try {
      next = apply(current, step.instance, catalogue);
    } catch (const KernelError&) {
      return false;
    }
    if (!(next == step.after)) return false;
    current = std::move(next);
  }
  return true;
}

}  // namespace sdnevb
