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

#include "sdnevb/events.hpp"

#include <algorithm>
#include <memory>

#include "sdnevb/scheduler.hpp"

namespace sdnevb {

std::string to_string(EventFamily family) {
  return family == EventFamily::Switch ? "switch" : "controller";
}

int kind_priority(MessageKind kind) {
  switch (kind) {
    case MessageKind::Barrier:
    case MessageKind::BarrierAck:
      return 7;
    case MessageKind::Del:
      return 5;
    case MessageKind::Modf:
      return 4;
    case MessageKind::Add:
      return 3;
    case MessageKind::StatusReq:
    case MessageKind::StatusRep:
      return 2;
    case MessageKind::PKOut:
      return 1;
    case MessageKind::PacketIn:
      return 0;
  }
  return 0;
}

const std::vector<std::string>& switch_event_names() {
  static const std::vector<std::string> names = {
      "sw_rcv_machingPkt", "sw_rcv_unmachingPkt", "sw_sndPk2ctrl",
      "sw_sndMsg2ctrl",    "sw_fwdLookup",        "sw_sendPckt2sw",
      "sw_rcv_Msg",        "sw_newFTentry",       "sw_modFTentry",
      "sw_delFTentry",     "sw_handlePkOut",      "sw_barrierRp",
      "sw_statusRp",
  };
  return names;
}

const std::vector<std::string>& controller_event_names() {
  static const std::vector<std::string> names = {
      "ctl_havePacket", "ctl_emitPkt",     "ctl_rcvPacketIn",
      "ctl_decideRule", "ctl_sendAdd",     "ctl_sendModf",
      "ctl_sendDel",    "ctl_askBarrier",  "ctl_rcvBarrierRp",
      "ctl_askStatusMsg", "ctl_rcvStatus",
  };
  return names;
}

namespace {

const SwitchState* find_switch(const GlobalState& s, SwitchId id) {
  auto it = s.switches.find(id);
  return it == s.switches.end() ? nullptr : &it->second;
}

const Message* find_message(const GlobalState& s, MessageId id) {
  auto it = s.messageStore.find(id);
  return it == s.messageStore.end() ? nullptr : &it->second;
}

const Packet* find_packet(const GlobalState& s, PacketId id) {
  auto it = s.packetStore.find(id);
  return it == s.packetStore.end() ? nullptr : &it->second;
}

// Fresh ids are interchangeable, so by default only the smallest pool id is
// admitted; branchFreshIds opens the whole pool.
bool fresh_message_ok(const GlobalState& s, const Context& ctx, MessageId m) {
  if (s.pools.messages.count(m) == 0) return false;
  return ctx.branchFreshIds || m == *s.pools.messages.begin();
}

bool fresh_entry_ok(const GlobalState& s, const Context& ctx, EntryId e) {
  if (s.pools.entries.count(e) == 0) return false;
  return ctx.branchFreshIds || e == *s.pools.entries.begin();
}

// The switch a message on the upward channel was sent by, if any.
std::optional<SwitchId> up_sender(const GlobalState& s, MessageId m) {
  for (const auto& [id, sw] : s.secureChanUp) {
    if (id == m) return sw;
  }
  return std::nullopt;
}

Message mint(MessageId id, MessageKind kind, Level level) {
  Message m;
  m.id = id;
  m.kind = kind;
  if (Level::L2 <= level) m.priority = kind_priority(kind);
  return m;
}

// Applies a matched entry: queue per output port from L1 on, destination
// switches resolved through the wiring at L0.
void route_packet(GlobalState& s, SwitchState& sw, const FlowEntry& entry,
                  PacketId pkt, Level level, const Context& ctx) {
  (void)s;
  if (Level::L1 <= level) {
    for (PortId port : entry.actions) sw.actionsQueues[port].insert(pkt);
    return;
  }
  std::set<SwitchId> dests;
  for (PortId port : entry.actions) {
    auto it = ctx.portToSwitch.find(port);
    if (it != ctx.portToSwitch.end()) dests.insert(it->second);
  }
  // No wired destination: the packet is dropped, matching what the queued
  // representation degenerates to under projection.
  if (!dests.empty()) sw.swOPk[pkt] = dests;
}

bool incoming_of_kind(const GlobalState& s, SwitchId swId, MessageId m,
                      MessageKind kind) {
  const SwitchState* sw = find_switch(s, swId);
  if (sw == nullptr || sw->swIncomingMsg.count(m) == 0) return false;
  const Message* msg = find_message(s, m);
  return msg != nullptr && msg->kind == kind;
}

// True when the guard of `def` holds for some binding whose first parameter
// is `sw`. Used by the L3 guards, which yield to higher-ranked events as long
// as those stay enabled on the same switch.
bool any_enabled_on_switch(const GlobalState& s, const EventDef& def,
                           SwitchId sw) {
  if (def.parameterSorts.empty() || def.parameterSorts.front() != Sort::Switch) {
    return false;
  }
  std::vector<Value> args(def.parameterSorts.size());
  args[0] = Value::of(sw);
  std::vector<std::vector<Value>> domains;
  for (std::size_t i = 1; i < def.parameterSorts.size(); ++i) {
    domains.push_back(sort_domain(s, def.parameterSorts[i]));
    if (domains.back().empty()) return false;
  }
  std::vector<std::size_t> idx(domains.size(), 0);
  while (true) {
    for (std::size_t i = 0; i < domains.size(); ++i) {
      args[i + 1] = domains[i][idx[i]];
    }
    if (def.guard(s, args)) return true;
    std::size_t k = 0;
    while (k < idx.size() && ++idx[k] == domains[k].size()) {
      idx[k] = 0;
      ++k;
    }
    if (k == idx.size()) return false;
  }
}

using Args = std::vector<Value>;

}  // namespace

std::vector<CatalogueRow> event_catalog(Level level, const Context& ctx) {
  std::vector<CatalogueRow> rows;
  auto add = [&](const std::string& name, EventFamily family,
                 std::vector<Sort> sorts, std::set<std::string> writes,
                 Guard guard, Action action) {
    CatalogueRow row;
    row.event.name = name;
    row.event.parameterSorts = std::move(sorts);
    row.event.guard = std::move(guard);
    row.event.action = std::move(action);
    row.family = family;
    row.introducedAt = Level::L0;
    if (Level::L0 < level) row.refines = name;
    row.writeSet = std::move(writes);
    rows.push_back(std::move(row));
  };
  const bool queued = Level::L1 <= level;  // forwarding buffer in use
  const std::string outBuf = queued ? "actionsQueues" : "swOPk";

  // A packet arrives on the data channel and matches an installed entry.
  add("sw_rcv_machingPkt", EventFamily::Switch, {Sort::Switch, Sort::Packet},
      {"dataChan", "swIPk"},
      [level](const GlobalState& s, const Args& a) {
        const SwitchState* sw = find_switch(s, a[0].as_switch());
        const Packet* pkt = find_packet(s, a[1].as_packet());
        if (sw == nullptr || pkt == nullptr) return false;
        if (s.dataChan.count({pkt->id, sw->id}) == 0) return false;
        if (packet_buffered(*sw, pkt->id)) return false;
        return match_entry(*sw, *pkt, level).has_value();
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        PacketId pkt = a[1].as_packet();
        t.dataChan.erase({pkt, sw.id});
        sw.swIPk[pkt] = match_entry(sw, t.packetStore.at(pkt), level)->id;
        return t;
      });

  // A packet arrives with no matching entry; the switch wraps it into a
  // fresh PacketIn for the controller (the table-miss path).
  add("sw_rcv_unmachingPkt", EventFamily::Switch,
      {Sort::Switch, Sort::Packet, Sort::Message},
      {"dataChan", "pools.messages", "messageStore", "swOMsg"},
      [level, ctx](const GlobalState& s, const Args& a) {
        const SwitchState* sw = find_switch(s, a[0].as_switch());
        const Packet* pkt = find_packet(s, a[1].as_packet());
        if (sw == nullptr || pkt == nullptr) return false;
        if (s.dataChan.count({pkt->id, sw->id}) == 0) return false;
        if (packet_buffered(*sw, pkt->id)) return false;
        if (match_entry(*sw, *pkt, level).has_value()) return false;
        return fresh_message_ok(s, ctx, a[2].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        PacketId pkt = a[1].as_packet();
        MessageId m = a[2].as_message();
        t.dataChan.erase({pkt, sw.id});
        t.pools.messages.erase(m);
        Message msg = mint(m, MessageKind::PacketIn, level);
        msg.packetPayload = pkt;
        t.messageStore[m] = msg;
        sw.swOMsg.insert(m);
        return t;
      });

  // The PacketIn report leaves for the controller.
  add("sw_sndPk2ctrl", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"swOMsg", "secureChanUp"},
      [](const GlobalState& s, const Args& a) {
        const SwitchState* sw = find_switch(s, a[0].as_switch());
        if (sw == nullptr || sw->swOMsg.count(a[1].as_message()) == 0) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        return msg != nullptr && msg->kind == MessageKind::PacketIn;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        sw.swOMsg.erase(m);
        t.secureChanUp.insert({m, sw.id});
        return t;
      });

  // Control replies (barrier acknowledgements, status reports) leave too.
  add("sw_sndMsg2ctrl", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"swOMsg", "secureChanUp"},
      [](const GlobalState& s, const Args& a) {
        const SwitchState* sw = find_switch(s, a[0].as_switch());
        if (sw == nullptr || sw->swOMsg.count(a[1].as_message()) == 0) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        return msg != nullptr && (msg->kind == MessageKind::BarrierAck ||
                                  msg->kind == MessageKind::StatusRep);
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        sw.swOMsg.erase(m);
        t.secureChanUp.insert({m, sw.id});
        return t;
      });

  // A buffered packet is pushed towards its outputs. The entry recorded at
  // match time may have been deleted meanwhile; the packet is then lost.
  add("sw_fwdLookup", EventFamily::Switch, {Sort::Switch, Sort::Packet},
      {"swIPk", outBuf},
      [](const GlobalState& s, const Args& a) {
        const SwitchState* sw = find_switch(s, a[0].as_switch());
        return sw != nullptr && sw->swIPk.count(a[1].as_packet()) > 0;
      },
      [level, ctx](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        PacketId pkt = a[1].as_packet();
        EntryId eid = sw.swIPk.at(pkt);
        sw.swIPk.erase(pkt);
        auto it = sw.flowTable.find(eid);
        if (it != sw.flowTable.end()) {
          route_packet(t, sw, it->second, pkt, level, ctx);
        }
        return t;
      });

  // A queued packet crosses the data channel to another switch.
  add("sw_sendPckt2sw", EventFamily::Switch,
      {Sort::Switch, Sort::Packet, Sort::Switch},
      {outBuf, "dataChan", "swSentPkts"},
      [level, ctx](const GlobalState& s, const Args& a) {
        SwitchId swId = a[0].as_switch();
        PacketId pkt = a[1].as_packet();
        SwitchId dst = a[2].as_switch();
        if (swId == dst) return false;
        const SwitchState* sw = find_switch(s, swId);
        if (sw == nullptr || find_switch(s, dst) == nullptr) return false;
        if (Level::L1 <= level) {
          for (const auto& [port, queue] : sw->actionsQueues) {
            auto it = ctx.portToSwitch.find(port);
            if (it != ctx.portToSwitch.end() && it->second == dst &&
                queue.count(pkt) > 0) {
              return true;
            }
          }
          return false;
        }
        auto it = sw->swOPk.find(pkt);
        return it != sw->swOPk.end() && it->second.count(dst) > 0;
      },
      [level, ctx](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        PacketId pkt = a[1].as_packet();
        SwitchId dst = a[2].as_switch();
        if (Level::L1 <= level) {
          for (auto it = sw.actionsQueues.begin();
               it != sw.actionsQueues.end();) {
            auto wired = ctx.portToSwitch.find(it->first);
            if (wired != ctx.portToSwitch.end() && wired->second == dst) {
              it->second.erase(pkt);
            }
            it = it->second.empty() ? sw.actionsQueues.erase(it)
                                    : std::next(it);
          }
        } else {
          auto it = sw.swOPk.find(pkt);
          it->second.erase(dst);
          if (it->second.empty()) sw.swOPk.erase(it);
        }
        t.dataChan.insert({pkt, dst});
        t.swSentPkts.insert(pkt);
        return t;
      });

  // A control message lands in the switch's inbox.
  add("sw_rcv_Msg", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"secureChanDown", "swIncomingMsg"},
      [](const GlobalState& s, const Args& a) {
        return find_switch(s, a[0].as_switch()) != nullptr &&
               s.secureChanDown.count(
                   {a[1].as_message(), a[0].as_switch()}) > 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        t.secureChanDown.erase({m, sw.id});
        sw.swIncomingMsg.insert(m);
        return t;
      });

  // Add installs a new entry; its id must be unused on this switch.
  add("sw_newFTentry", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"flowTable", "swIncomingMsg", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        if (!incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                              MessageKind::Add)) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        return msg->entryPayload.has_value() &&
               find_switch(s, a[0].as_switch())
                       ->flowTable.count(msg->entryPayload->id) == 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        const FlowEntry entry = *t.messageStore.at(m).entryPayload;
        sw.flowTable[entry.id] = entry;
        sw.swIncomingMsg.erase(m);
        t.messageStore.erase(m);
        return t;
      });

  // Modf replaces an installed entry wholesale.
  add("sw_modFTentry", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"flowTable", "swIncomingMsg", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        if (!incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                              MessageKind::Modf)) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        return msg->entryPayload.has_value() &&
               find_switch(s, a[0].as_switch())
                       ->flowTable.count(msg->entryPayload->id) > 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        const FlowEntry entry = *t.messageStore.at(m).entryPayload;
        sw.flowTable[entry.id] = entry;
        sw.swIncomingMsg.erase(m);
        t.messageStore.erase(m);
        return t;
      });

  add("sw_delFTentry", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"flowTable", "swIncomingMsg", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        if (!incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                              MessageKind::Del)) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        return msg->entryPayload.has_value() &&
               find_switch(s, a[0].as_switch())
                       ->flowTable.count(msg->entryPayload->id) > 0;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        sw.flowTable.erase(t.messageStore.at(m).entryPayload->id);
        sw.swIncomingMsg.erase(m);
        t.messageStore.erase(m);
        return t;
      });

  // PKOut runs the carried packet through the table. On a miss the message
  // turns into a PacketIn under the same id and goes back up.
  add("sw_handlePkOut", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"swIncomingMsg", "messageStore", "swOMsg", outBuf},
      [](const GlobalState& s, const Args& a) {
        if (!incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                              MessageKind::PKOut)) {
          return false;
        }
        const Message* msg = find_message(s, a[1].as_message());
        if (!msg->packetPayload.has_value()) return false;
        const Packet* pkt = find_packet(s, *msg->packetPayload);
        return pkt != nullptr &&
               !packet_buffered(*find_switch(s, a[0].as_switch()), pkt->id);
      },
      [level, ctx](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        PacketId pkt = *t.messageStore.at(m).packetPayload;
        sw.swIncomingMsg.erase(m);
        auto entry = match_entry(sw, t.packetStore.at(pkt), level);
        if (entry.has_value()) {
          route_packet(t, sw, *entry, pkt, level, ctx);
          t.messageStore.erase(m);
        } else {
          Message msg = mint(m, MessageKind::PacketIn, level);
          msg.packetPayload = pkt;
          t.messageStore[m] = msg;
          sw.swOMsg.insert(m);
        }
        return t;
      });

  // Barrier turns into its acknowledgement under the same id.
  add("sw_barrierRp", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"swIncomingMsg", "messageStore", "swOMsg"},
      [](const GlobalState& s, const Args& a) {
        return incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                                MessageKind::Barrier);
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        sw.swIncomingMsg.erase(m);
        t.messageStore[m] = mint(m, MessageKind::BarrierAck, level);
        sw.swOMsg.insert(m);
        return t;
      });

  // StatusReq turns into a StatusRep carrying the switch's status.
  add("sw_statusRp", EventFamily::Switch, {Sort::Switch, Sort::Message},
      {"swIncomingMsg", "messageStore", "swOMsg"},
      [](const GlobalState& s, const Args& a) {
        return incoming_of_kind(s, a[0].as_switch(), a[1].as_message(),
                                MessageKind::StatusReq);
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchState& sw = t.switches.at(a[0].as_switch());
        MessageId m = a[1].as_message();
        sw.swIncomingMsg.erase(m);
        Message msg = mint(m, MessageKind::StatusRep, level);
        msg.statusPayload = sw.status;
        t.messageStore[m] = msg;
        sw.swOMsg.insert(m);
        return t;
      });

  // The environment hands the controller a packet to place.
  add("ctl_havePacket", EventFamily::Controller, {Sort::Packet},
      {"pools.packets", "ctlOutgoingPk"},
      [](const GlobalState& s, const Args& a) {
        PacketId pkt = a[0].as_packet();
        return s.pools.packets.count(pkt) > 0 &&
               find_packet(s, pkt) != nullptr;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        PacketId pkt = a[0].as_packet();
        t.pools.packets.erase(pkt);
        t.controller.ctlOutgoingPk.insert(pkt);
        return t;
      });

  // The controller wraps an outgoing packet into a PKOut for a switch.
  add("ctl_emitPkt", EventFamily::Controller,
      {Sort::Switch, Sort::Packet, Sort::Message},
      {"ctlOutgoingPk", "pools.messages", "messageStore", "secureChanDown",
       "ctlSentPkts"},
      [ctx](const GlobalState& s, const Args& a) {
        return find_switch(s, a[0].as_switch()) != nullptr &&
               s.controller.ctlOutgoingPk.count(a[1].as_packet()) > 0 &&
               fresh_message_ok(s, ctx, a[2].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchId sw = a[0].as_switch();
        PacketId pkt = a[1].as_packet();
        MessageId m = a[2].as_message();
        t.controller.ctlOutgoingPk.erase(pkt);
        t.pools.messages.erase(m);
        Message msg = mint(m, MessageKind::PKOut, level);
        msg.packetPayload = pkt;
        t.messageStore[m] = msg;
        t.secureChanDown.insert({m, sw});
        t.ctlSentPkts.insert(pkt);
        return t;
      });

  // A PacketIn is lifted off the upward channel; the packet and its origin
  // are remembered for rule decisions.
  add("ctl_rcvPacketIn", EventFamily::Controller, {Sort::Message},
      {"secureChanUp", "ctlIncomingPk", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        MessageId m = a[0].as_message();
        if (!up_sender(s, m).has_value()) return false;
        const Message* msg = find_message(s, m);
        return msg != nullptr && msg->kind == MessageKind::PacketIn &&
               msg->packetPayload.has_value();
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[0].as_message();
        SwitchId sw = *up_sender(t, m);
        PacketId pkt = *t.messageStore.at(m).packetPayload;
        t.secureChanUp.erase({m, sw});
        t.controller.ctlIncomingPk[pkt] = sw;
        t.messageStore.erase(m);
        return t;
      });

  // The controller mints an entry matching the reported packet's first
  // header, queues an Add order for the origin switch, and requeues the
  // packet for emission.
  add("ctl_decideRule", EventFamily::Controller, {Sort::Packet, Sort::Entry},
      {"ctlIncomingPk", "ctlOutgoingPk", "pendingOrders", "pools.entries"},
      [ctx](const GlobalState& s, const Args& a) {
        return s.controller.ctlIncomingPk.count(a[0].as_packet()) > 0 &&
               fresh_entry_ok(s, ctx, a[1].as_entry());
      },
      [ctx](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        PacketId pkt = a[0].as_packet();
        EntryId eid = a[1].as_entry();
        SwitchId origin = t.controller.ctlIncomingPk.at(pkt);
        t.pools.entries.erase(eid);
        FlowEntry entry;
        entry.id = eid;
        entry.eHeader1 = t.packetStore.at(pkt).pHeader1;
        entry.actions = {ctx.defaultMintPort};
        t.controller.pendingOrders.push_back(
            {MessageKind::Add, origin, entry});
        t.controller.ctlIncomingPk.erase(pkt);
        t.controller.ctlOutgoingPk.insert(pkt);
        return t;
      });

  // The order pipeline is FIFO: only the head order can leave, as the
  // matching send event for its verb.
  auto add_send = [&](const std::string& name, MessageKind verb) {
    add(name, EventFamily::Controller,
        {Sort::Switch, Sort::Entry, Sort::Message},
        {"pendingOrders", "pools.messages", "messageStore", "secureChanDown"},
        [verb, ctx](const GlobalState& s, const Args& a) {
          if (s.controller.pendingOrders.empty()) return false;
          const PendingOrder& head = s.controller.pendingOrders.front();
          return head.verb == verb && head.target == a[0].as_switch() &&
                 head.entry.id == a[1].as_entry() &&
                 find_switch(s, a[0].as_switch()) != nullptr &&
                 fresh_message_ok(s, ctx, a[2].as_message());
        },
        [verb, level](const GlobalState& s, const Args& a) {
          GlobalState t = s;
          SwitchId sw = a[0].as_switch();
          MessageId m = a[2].as_message();
          PendingOrder head = t.controller.pendingOrders.front();
          t.controller.pendingOrders.erase(
              t.controller.pendingOrders.begin());
          t.pools.messages.erase(m);
          Message msg = mint(m, verb, level);
          msg.entryPayload = head.entry;
          t.messageStore[m] = msg;
          t.secureChanDown.insert({m, sw});
          return t;
        });
  };
  add_send("ctl_sendAdd", MessageKind::Add);
  add_send("ctl_sendModf", MessageKind::Modf);
  add_send("ctl_sendDel", MessageKind::Del);

  // One barrier in flight per switch; asks come from the scenario.
  add("ctl_askBarrier", EventFamily::Controller, {Sort::Switch, Sort::Message},
      {"barrierAsks", "pendingBarrier", "pools.messages", "messageStore",
       "secureChanDown"},
      [ctx](const GlobalState& s, const Args& a) {
        SwitchId sw = a[0].as_switch();
        return find_switch(s, sw) != nullptr &&
               s.controller.barrierAsks.count(sw) > 0 &&
               s.controller.pendingBarrier.count(sw) == 0 &&
               fresh_message_ok(s, ctx, a[1].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchId sw = a[0].as_switch();
        MessageId m = a[1].as_message();
        t.controller.barrierAsks.erase(t.controller.barrierAsks.find(sw));
        t.controller.pendingBarrier.insert(sw);
        t.pools.messages.erase(m);
        t.messageStore[m] = mint(m, MessageKind::Barrier, level);
        t.secureChanDown.insert({m, sw});
        return t;
      });

  add("ctl_rcvBarrierRp", EventFamily::Controller, {Sort::Message},
      {"secureChanUp", "pendingBarrier", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        MessageId m = a[0].as_message();
        if (!up_sender(s, m).has_value()) return false;
        const Message* msg = find_message(s, m);
        return msg != nullptr && msg->kind == MessageKind::BarrierAck;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[0].as_message();
        SwitchId sw = *up_sender(t, m);
        t.secureChanUp.erase({m, sw});
        t.controller.pendingBarrier.erase(sw);
        t.messageStore.erase(m);
        return t;
      });

  add("ctl_askStatusMsg", EventFamily::Controller,
      {Sort::Switch, Sort::Message},
      {"statusAsks", "pendingStatus", "pools.messages", "messageStore",
       "secureChanDown"},
      [ctx](const GlobalState& s, const Args& a) {
        SwitchId sw = a[0].as_switch();
        return find_switch(s, sw) != nullptr &&
               s.controller.statusAsks.count(sw) > 0 &&
               s.controller.pendingStatus.count(sw) == 0 &&
               fresh_message_ok(s, ctx, a[1].as_message());
      },
      [level](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        SwitchId sw = a[0].as_switch();
        MessageId m = a[1].as_message();
        t.controller.statusAsks.erase(t.controller.statusAsks.find(sw));
        t.controller.pendingStatus.insert(sw);
        t.pools.messages.erase(m);
        t.messageStore[m] = mint(m, MessageKind::StatusReq, level);
        t.secureChanDown.insert({m, sw});
        return t;
      });

  add("ctl_rcvStatus", EventFamily::Controller, {Sort::Message},
      {"secureChanUp", "pendingStatus", "messageStore"},
      [](const GlobalState& s, const Args& a) {
        MessageId m = a[0].as_message();
        if (!up_sender(s, m).has_value()) return false;
        const Message* msg = find_message(s, m);
        return msg != nullptr && msg->kind == MessageKind::StatusRep;
      },
      [](const GlobalState& s, const Args& a) {
        GlobalState t = s;
        MessageId m = a[0].as_message();
        SwitchId sw = *up_sender(t, m);
        t.secureChanUp.erase({m, sw});
        t.controller.pendingStatus.erase(sw);
        t.messageStore.erase(m);
        return t;
      });

  if (level == Level::L3) {
    // Guard strengthening: an event yields while a strictly higher-ranked
    // event is enabled (in the unstrengthened sense) on the same switch.
    auto base = std::make_shared<std::map<std::string, EventDef>>();
    for (const auto& row : rows) (*base)[row.event.name] = row.event;
    const auto above = transitive_closure(l3_priority_order());
    for (auto& row : rows) {
      auto it = above.find(row.event.name);
      if (it == above.end()) continue;
      const std::set<std::string> higher = it->second;
      const Guard plain = row.event.guard;
      row.event.guard = [plain, higher, base](const GlobalState& s,
                                              const Args& a) {
        if (!plain(s, a)) return false;
        SwitchId sw = a[0].as_switch();
        for (const auto& name : higher) {
          if (any_enabled_on_switch(s, base->at(name), sw)) return false;
        }
        return true;
      };
    }
  }
  return rows;
}

std::vector<EventDef> event_defs(const std::vector<CatalogueRow>& rows) {
  std::vector<EventDef> defs;
  defs.reserve(rows.size());
  for (const auto& row : rows) defs.push_back(row.event);
  return defs;
}

const CatalogueRow& catalogue_row(const std::vector<CatalogueRow>& rows,
                                  const std::string& name) {
  for (const auto& row : rows) {
    if (row.event.name == name) return row;
  }
  throw UnknownEvent("no catalogue row named " + name);
}

std::map<std::string, std::string> refines_map(Level level) {
  if (level == Level::L0) {
    throw LevelError("L0 is the initial machine and refines nothing");
  }
  std::map<std::string, std::string> names;
  for (const auto& name : switch_event_names()) names[name] = name;
  for (const auto& name : controller_event_names()) names[name] = name;
  return names;
}

}  // namespace sdnevb
