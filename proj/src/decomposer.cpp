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

#include "sdnevb/decomposer.hpp"

#include <algorithm>

namespace sdnevb {

namespace {

const std::set<std::string>& shared_variables() {
  static const std::set<std::string> shared = {
      "secureChanDown", "secureChanUp", "dataChan", "ctlSentPkts",
      "swSentPkts"};
  return shared;
}

const std::set<std::string>& context_variables() {
  static const std::set<std::string> context = {
      "pools.packets", "pools.messages", "pools.entries", "messageStore",
      "packetStore"};
  return context;
}

const std::set<std::string>& controller_private() {
  static const std::set<std::string> vars = {
      "ctlIncomingPk", "ctlOutgoingPk", "pendingOrders", "barrierAsks",
      "pendingBarrier", "statusAsks", "pendingStatus"};
  return vars;
}

const std::set<std::string>& switches_private() {
  static const std::set<std::string> vars = {
      "status", "flowTable", "swIncomingMsg", "swIPk",
      "swOMsg", "swOPk",     "actionsQueues"};
  return vars;
}

bool switch_known(const GlobalState& s, SwitchId sw) {
  return s.switches.count(sw) > 0;
}

bool fresh_message(const GlobalState& s, const Context& ctx, MessageId m) {
  if (s.pools.messages.count(m) == 0) return false;
  return ctx.branchFreshIds || m == *s.pools.messages.begin();
}

std::optional<SwitchId> up_sender(const GlobalState& s, MessageId m) {
  for (const auto& [id, sw] : s.secureChanUp) {
    if (id == m) return sw;
  }
  return std::nullopt;
}

bool on_any_channel(const GlobalState& s, MessageId m) {
  for (const auto& [id, sw] : s.secureChanDown) {
    if (id == m) return true;
  }
  return up_sender(s, m).has_value();
}

Message mint(MessageId id, MessageKind kind, Level level) {
  Message m;
  m.id = id;
  m.kind = kind;
  if (Level::L2 <= level) m.priority = kind_priority(kind);
  return m;
}

using Args = std::vector<Value>;

CatalogueRow ext_row(const std::string& name, EventFamily family,
                     std::vector<Sort> sorts,
                     std::vector<std::vector<Value>> domains,
                     std::set<std::string> writes, Guard guard,
                     Action action) {
  CatalogueRow row;
  row.event.name = name;
  row.event.parameterSorts = std::move(sorts);
  row.event.guard = std::move(guard);
  row.event.action = std::move(action);
  row.event.domains = std::move(domains);
  row.family = family;
  row.external = true;
  row.writeSet = std::move(writes);
  return row;
}

// The six switch events that write shared variables, replayed from the
// controller's side of the fence.
std::vector<CatalogueRow> controller_externals(Level level,
                                               const Context& ctx) {
  std::vector<CatalogueRow> rows;

  // Both receive mirrors just take the packet off the wire; the component
  // cannot tell a hit from a miss.
  for (const char* name : {"ext_sw_rcv_machingPkt", "ext_sw_rcv_unmachingPkt"}) {
    rows.push_back(ext_row(
        name, EventFamily::Switch, {Sort::Switch, Sort::Packet}, {},
        {"dataChan"},
        [](const GlobalState& s, const Args& a) {
          return s.dataChan.count({a[1].as_packet(), a[0].as_switch()}) > 0;
        },
        [](const GlobalState& s, const Args& a) {
          GlobalState t = s;
          t.dataChan.erase({a[1].as_packet(), a[0].as_switch()});
          return t;
        }));
  }

  rows.push_back(ext_row(
      "ext_sw_sndPk2ctrl", EventFamily::Switch,
      {Sort::Switch, Sort::Packet, Sort::Message}, {},
      {"pools.messages", "messageStore", "secureChanUp"},
      [ctx](const GlobalState& s, const Args& a) {
        return switch_known(s, a[0].as_switch()) &&
               s.packetStore.count(a[1].as_packet()) > 0 &&
               fresh_message(s, ctx, a[2].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[2].as_message();
        t.pools.messages.erase(m);
        Message msg = mint(m, MessageKind::PacketIn, level);
        msg.packetPayload = a[1].as_packet();
        t.messageStore[m] = msg;
        t.secureChanUp.insert({m, a[0].as_switch()});
        return t;
      }));

  // A consumed Barrier or StatusReq comes back as its reply, same id.
  rows.push_back(ext_row(
      "ext_sw_sndMsg2ctrl", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {}, {"messageStore", "secureChanUp"},
      [](const GlobalState& s, const Args& a) {
        if (!switch_known(s, a[0].as_switch())) return false;
        auto it = s.messageStore.find(a[1].as_message());
        if (it == s.messageStore.end()) return false;
        if (it->second.kind != MessageKind::Barrier &&
            it->second.kind != MessageKind::StatusReq) {
          return false;
        }
        return !on_any_channel(s, a[1].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[1].as_message();
        const MessageKind was = t.messageStore.at(m).kind;
        Message msg = mint(m,
                           was == MessageKind::Barrier
                               ? MessageKind::BarrierAck
                               : MessageKind::StatusRep,
                           level);
        if (msg.kind == MessageKind::StatusRep) {
          msg.statusPayload = SwitchStatus::Active;
        }
        t.messageStore[m] = msg;
        t.secureChanUp.insert({m, a[0].as_switch()});
        return t;
      }));

  rows.push_back(ext_row(
      "ext_sw_sendPckt2sw", EventFamily::Switch,
      {Sort::Switch, Sort::Packet, Sort::Switch}, {},
      {"dataChan", "swSentPkts"},
      [](const GlobalState& s, const Args& a) {
        return a[0].as_switch() != a[2].as_switch() &&
               switch_known(s, a[0].as_switch()) &&
               switch_known(s, a[2].as_switch()) &&
               s.packetStore.count(a[1].as_packet()) > 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        t.dataChan.insert({a[1].as_packet(), a[2].as_switch()});
        t.swSentPkts.insert(a[1].as_packet());
        return t;
      }));

  rows.push_back(ext_row(
      "ext_sw_rcv_Msg", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {}, {"secureChanDown"},
      [](const GlobalState& s, const Args& a) {
        return s.secureChanDown.count(
                   {a[1].as_message(), a[0].as_switch()}) > 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        t.secureChanDown.erase({a[1].as_message(), a[0].as_switch()});
        return t;
      }));

  return rows;
}

// The nine controller events that write shared variables, replayed from the
// switches' side. Order payloads are over-approximated over the universe.
std::vector<CatalogueRow> switch_externals(Level level, const Context& ctx,
                                           const ExternalUniverse& universe) {
  std::vector<CatalogueRow> rows;

  rows.push_back(ext_row(
      "ext_ctl_emitPkt", EventFamily::Controller,
      {Sort::Switch, Sort::Packet, Sort::Message}, {},
      {"pools.messages", "messageStore", "secureChanDown", "ctlSentPkts"},
      [ctx](const GlobalState& s, const Args& a) {
        return switch_known(s, a[0].as_switch()) &&
               s.packetStore.count(a[1].as_packet()) > 0 &&
               fresh_message(s, ctx, a[2].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[2].as_message();
        t.pools.messages.erase(m);
        Message msg = mint(m, MessageKind::PKOut, level);
        msg.packetPayload = a[1].as_packet();
        t.messageStore[m] = msg;
        t.secureChanDown.insert({m, a[0].as_switch()});
        t.ctlSentPkts.insert(a[1].as_packet());
        return t;
      }));

  auto lift_receiver = [&](const std::string& name, MessageKind kind) {
    rows.push_back(ext_row(
        name, EventFamily::Controller, {Sort::Message}, {},
        {"secureChanUp", "messageStore"},
        [kind](const GlobalState& s, const Args& a) {
          MessageId m = a[0].as_message();
          if (!up_sender(s, m).has_value()) return false;
          auto it = s.messageStore.find(m);
          return it != s.messageStore.end() && it->second.kind == kind;
        },
        [](const GlobalState& s, const Args& a) {
          GlobalState t = s;
          MessageId m = a[0].as_message();
          t.secureChanUp.erase({m, *up_sender(t, m)});
          t.messageStore.erase(m);
          return t;
        }));
  };
  lift_receiver("ext_ctl_rcvPacketIn", MessageKind::PacketIn);

  std::vector<Value> entryDomain, headerDomain, portDomain;
  for (EntryId id : universe.entryIds) entryDomain.push_back(Value::of(id));
  for (Header h : universe.headers) headerDomain.push_back(Value::of(h));
  for (PortId p : universe.ports) portDomain.push_back(Value::of(p));

  auto order_sender = [&](const std::string& name, MessageKind verb) {
    rows.push_back(ext_row(
        name, EventFamily::Controller,
        {Sort::Switch, Sort::Entry, Sort::Hdr, Sort::Port, Sort::Message},
        {{}, entryDomain, headerDomain, portDomain, {}},
        {"pools.messages", "messageStore", "secureChanDown"},
        [ctx](const GlobalState& s, const Args& a) {
          return switch_known(s, a[0].as_switch()) &&
                 fresh_message(s, ctx, a[4].as_message());
        },
        [level, verb](const GlobalState& s, const Args& a) {
          GlobalState t = s;
          MessageId m = a[4].as_message();
          t.pools.messages.erase(m);
          Message msg = mint(m, verb, level);
          FlowEntry entry;
          entry.id = a[1].as_entry();
          entry.eHeader1 = a[2].as_header();
          entry.actions = {a[3].as_port()};
          msg.entryPayload = entry;
          t.messageStore[m] = msg;
          t.secureChanDown.insert({m, a[0].as_switch()});
          return t;
        }));
  };
  order_sender("ext_ctl_sendAdd", MessageKind::Add);
  order_sender("ext_ctl_sendModf", MessageKind::Modf);

  rows.push_back(ext_row(
      "ext_ctl_sendDel", EventFamily::Controller,
      {Sort::Switch, Sort::Entry, Sort::Message}, {{}, entryDomain, {}},
      {"pools.messages", "messageStore", "secureChanDown"},
      [ctx](const GlobalState& s, const Args& a) {
        return switch_known(s, a[0].as_switch()) &&
               fresh_message(s, ctx, a[2].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[2].as_message();
        t.pools.messages.erase(m);
        Message msg = mint(m, MessageKind::Del, level);
        FlowEntry entry;
        entry.id = a[1].as_entry();
        msg.entryPayload = entry;
        t.messageStore[m] = msg;
        t.secureChanDown.insert({m, a[0].as_switch()});
        return t;
      }));

  auto plain_asker = [&](const std::string& name, MessageKind kind) {
    rows.push_back(ext_row(
        name, EventFamily::Controller, {Sort::Switch, Sort::Message}, {},
        {"pools.messages", "messageStore", "secureChanDown"},
        [ctx](const GlobalState& s, const Args& a) {
          return switch_known(s, a[0].as_switch()) &&
                 fresh_message(s, ctx, a[1].as_message());
        },
        [level, kind](const GlobalState& s, const Args& a) {
          GlobalState t = s;
          MessageId m = a[1].as_message();
          t.pools.messages.erase(m);
          t.messageStore[m] = mint(m, kind, level);
          t.secureChanDown.insert({m, a[0].as_switch()});
          return t;
        }));
  };
  plain_asker("ext_ctl_askBarrier", MessageKind::Barrier);
  plain_asker("ext_ctl_askStatusMsg", MessageKind::StatusReq);

  lift_receiver("ext_ctl_rcvBarrierRp", MessageKind::BarrierAck);
  lift_receiver("ext_ctl_rcvStatus", MessageKind::StatusRep);

  return rows;
}

}  // namespace

Decomposition decompose(Level level, const Context& ctx,
                        const ExternalUniverse& universe) {
  Decomposition parts;
  parts.sharedVariables = shared_variables();
  parts.contextVariables = context_variables();

  const auto composed = event_catalog(level, ctx);
  parts.controller.name = "controller";
  parts.controller.privateVariables = controller_private();
  parts.switches.name = "switches";
  parts.switches.privateVariables = switches_private();

  for (const auto& row : composed) {
    if (row.family == EventFamily::Controller) {
      parts.controller.rows.push_back(row);
      parts.controller.ownEvents.insert(row.event.name);
    } else {
      parts.switches.rows.push_back(row);
      parts.switches.ownEvents.insert(row.event.name);
    }
  }
  for (auto& row : controller_externals(level, ctx)) {
    parts.controller.externalEvents.insert(row.event.name);
    parts.controller.rows.push_back(std::move(row));
  }
  for (auto& row : switch_externals(level, ctx, universe)) {
    parts.switches.externalEvents.insert(row.event.name);
    parts.switches.rows.push_back(std::move(row));
  }
  return parts;
}

namespace {

std::set<std::string> graph_keys(const StateGraph& g) {
  std::set<std::string> keys;
  for (const auto& state : g.states) keys.insert(canonical_serialize(state));
  return keys;
}

std::vector<std::string> graph_edge_keys(const StateGraph& g) {
  std::vector<std::string> keys;
  keys.reserve(g.edges.size());
  for (const auto& edge : g.edges) {
    keys.push_back(g.digests[edge.from] + " --" + to_string(edge.label) +
                   "--> " + g.digests[edge.to]);
  }
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::set<std::string> set_union(const std::set<std::string>& a,
                                const std::set<std::string>& b) {
  std::set<std::string> out = a;
  out.insert(b.begin(), b.end());
  return out;
}

}  // namespace

RecompositionReport check_recomposition(const Decomposition& parts,
                                        Level level, const Context& ctx,
                                        const GlobalState& initial,
                                        const ExploreOptions& options) {
  RecompositionReport report;
  auto issue = [&report](std::string text) {
    report.ok = false;
    report.issues.push_back(std::move(text));
  };

  // The two own-event sets must split the full catalogue along families.
  const auto composedRows = event_catalog(level, ctx);
  {
    std::set<std::string> all;
    for (const auto& row : composedRows) all.insert(row.event.name);
    std::set<std::string> merged = set_union(parts.controller.ownEvents,
                                             parts.switches.ownEvents);
    if (merged != all) issue("own events do not cover the catalogue");
    for (const auto& name : parts.controller.ownEvents) {
      if (parts.switches.ownEvents.count(name) > 0) {
        issue("event owned by both components: " + name);
      }
      if (catalogue_row(composedRows, name).family !=
          EventFamily::Controller) {
        issue("controller owns a switch event: " + name);
      }
    }
    for (const auto& name : parts.switches.ownEvents) {
      if (catalogue_row(composedRows, name).family != EventFamily::Switch) {
        issue("switches own a controller event: " + name);
      }
    }
  }

  // Variable partition: private sets, shared set and context set must tile
  // the state components exactly.
  {
    std::set<std::string> everything;
    for (const auto& [name, value] : state_fields(initial)) {
      everything.insert(name);
    }
    std::set<std::string> tiled =
        set_union(set_union(parts.controller.privateVariables,
                            parts.switches.privateVariables),
                  set_union(parts.sharedVariables, parts.contextVariables));
    if (tiled != everything) issue("variable partition does not tile state");
    for (const auto& name : parts.controller.privateVariables) {
      if (parts.switches.privateVariables.count(name) > 0) {
        issue("variable private to both components: " + name);
      }
    }
  }

  // Replaying the merged own events must rebuild the composed graph.
  const auto composedDefs = event_defs(composedRows);
  StateGraph composed = explore(initial, composedDefs, options);
  report.composedStates = composed.states.size();
  {
    std::vector<EventDef> merged;
    for (const auto& row : parts.controller.rows) {
      if (!row.external) merged.push_back(row.event);
    }
    for (const auto& row : parts.switches.rows) {
      if (!row.external) merged.push_back(row.event);
    }
    StateGraph recomposed = explore(initial, merged, options);
    report.recomposedStates = recomposed.states.size();
    if (graph_keys(composed) != graph_keys(recomposed)) {
      issue("recomposed machine reaches a different state set");
    } else if (graph_edge_keys(composed) != graph_edge_keys(recomposed)) {
      issue("recomposed machine takes different steps");
    }
  }

  // Write discipline, first as declared, then empirically: every event of
  // each component is replayed from a stride of composed states and the
  // fields it actually changed must stay inside its partition. Composed
  // states are realistic contexts, so every row gets exercised without
  // exploring the over-approximated environment's blow-up.
  const std::set<std::string> extAllowed =
      set_union(parts.sharedVariables, parts.contextVariables);
  for (const Component* component : {&parts.controller, &parts.switches}) {
    const std::set<std::string> ownAllowed =
        set_union(component->privateVariables, extAllowed);
    std::set<std::pair<std::string, std::string>> reported;
    auto offence = [&](const EventInstance& instance, const GlobalState& from,
                       const GlobalState& to) {
      const auto& allowed =
          component->externalEvents.count(instance.eventName) > 0 ? extAllowed
                                                                  : ownAllowed;
      for (const auto& field : diff_fields(from, to)) {
        if (allowed.count(field) == 0 &&
            reported.emplace(instance.eventName, field).second) {
          issue(component->name + ": " + instance.eventName +
                " wrote outside its partition: " + field);
        }
      }
    };

    for (const auto& row : component->rows) {
      const auto& allowed = row.external ? extAllowed : ownAllowed;
      for (const auto& field : row.writeSet) {
        if (allowed.count(field) == 0) {
          issue(component->name + ": " + row.event.name +
                " declares a write outside its partition: " + field);
        }
      }

      const std::vector<EventDef> only{row.event};
      const std::size_t stride = std::max<std::size_t>(
          std::size_t{1}, composed.states.size() / 64);
      int budget = 200;
      for (std::size_t i = 0; i < composed.states.size() && budget > 0;
           i += stride) {
        const GlobalState& from = composed.states[i];
        for (const auto& instance : enabled_instances(from, only)) {
          if (budget-- <= 0) break;
          offence(instance, from, apply(from, instance, only));
        }
      }
    }

    // A short standalone run from the initial state: the bound keeps the
    // arbitrary-environment blow-up at bay, and every visited state must
    // still satisfy the safety invariants this component can express.
    ExploreOptions sampled = options;
    if (sampled.maxDepth < 0) sampled.maxDepth = 3;
    if (sampled.maxBranch < 0) sampled.maxBranch = 24;
    StateGraph alone = explore(initial, event_defs(component->rows), sampled);
    (component->name == "controller" ? report.controllerStates
                                     : report.switchesStates) =
        alone.states.size();
    for (const auto& edge : alone.edges) {
      offence(edge.label, alone.states[edge.from], alone.states[edge.to]);
    }

    std::vector<Invariant> projected;
    for (auto& inv : safety_suite(level)) {
      if (std::includes(ownAllowed.begin(), ownAllowed.end(),
                        inv.fields.begin(), inv.fields.end())) {
        projected.push_back(std::move(inv));
      }
    }
    for (const auto& result : check_invariants(alone, projected)) {
      if (!result.holds) {
        issue(component->name + " standalone breaks: " + result.invariant +
              (result.detail ? " (" + *result.detail + ")" : ""));
      }
    }
  }

  return report;
}

}  // namespace sdnevb
