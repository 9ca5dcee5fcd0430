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

#include <algorithm>

#include "doctest.h"
#include "sdnevb/events.hpp"
#include "sdnevb/scenario.hpp"

namespace sdnevb {
namespace {

std::set<std::string> enabled_names(const GlobalState& s,
                                    const std::vector<EventDef>& defs) {
  std::set<std::string> names;
  for (const auto& inst : enabled_instances(s, defs)) {
    names.insert(to_string(inst));
  }
  return names;
}

GlobalState step(const GlobalState& s, const std::string& text,
                 const std::vector<EventDef>& defs) {
  const auto inst = parse_instance(text);
  REQUIRE_MESSAGE(inst.has_value(), text);
  return apply(s, *inst, defs);
}

Context two_port_context() {
  Context ctx;
  ctx.portToSwitch = {{PortId{1}, SwitchId{2}}, {PortId{2}, SwitchId{1}}};
  ctx.defaultMintPort = PortId{1};
  return ctx;
}

TEST_CASE("the catalogue has 24 events split 13 switch / 11 controller") {
  const Context ctx = two_port_context();
  for (Level level : {Level::L0, Level::L1, Level::L2, Level::L3}) {
    const auto rows = event_catalog(level, ctx);
    CHECK(rows.size() == 24);
    std::set<std::string> sw, ctl;
    for (const auto& row : rows) {
      (row.family == EventFamily::Switch ? sw : ctl).insert(row.event.name);
      CHECK_FALSE(row.external);
      CHECK_FALSE(row.writeSet.empty());
    }
    const auto& swNames = switch_event_names();
    const auto& ctlNames = controller_event_names();
    CHECK(sw == std::set<std::string>(swNames.begin(), swNames.end()));
    CHECK(ctl == std::set<std::string>(ctlNames.begin(), ctlNames.end()));
    CHECK(sw.size() == 13);
    CHECK(ctl.size() == 11);
  }
  CHECK_THROWS_AS(catalogue_row(event_catalog(Level::L0, ctx), "nothing"),
                  UnknownEvent);
}

TEST_CASE("each level above L0 refines the full catalogue one to one") {
  for (Level level : {Level::L1, Level::L2, Level::L3}) {
    const auto refines = refines_map(level);
    CHECK(refines.size() == 24);
    for (const auto& [name, abstract] : refines) CHECK(name == abstract);
  }
  CHECK_THROWS_AS(refines_map(Level::L0), LevelError);
}

TEST_CASE("urgency ranks barriers above orders above plain traffic") {
  CHECK(kind_priority(MessageKind::Barrier) == 7);
  CHECK(kind_priority(MessageKind::BarrierAck) == 7);
  CHECK(kind_priority(MessageKind::Del) == 5);
  CHECK(kind_priority(MessageKind::Modf) == 4);
  CHECK(kind_priority(MessageKind::Add) == 3);
  CHECK(kind_priority(MessageKind::StatusReq) == 2);
  CHECK(kind_priority(MessageKind::StatusRep) == 2);
  CHECK(kind_priority(MessageKind::PKOut) == 1);
  CHECK(kind_priority(MessageKind::PacketIn) == 0);
}

// The packet round trip on the two-switch network: picked up, pushed to s1,
// forwarded to s2, missed there, escalated, decided, installed.
TEST_CASE("a packet travels pickup, push, forward, miss, decide, install") {
  const Scenario scenario = find_scenario("s1");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  GlobalState s = scenario.initial;

  CHECK(enabled_names(s, defs) == std::set<std::string>{"ctl_havePacket(p1)"});
  s = step(s, "ctl_havePacket(p1)", defs);
  CHECK(s.controller.ctlOutgoingPk == std::set<PacketId>{PacketId{1}});
  CHECK(enabled_names(s, defs) ==
        std::set<std::string>{"ctl_emitPkt(s1,p1,m1)", "ctl_emitPkt(s2,p1,m1)"});

  s = step(s, "ctl_emitPkt(s1,p1,m1)", defs);
  CHECK(s.secureChanDown.count({MessageId{1}, SwitchId{1}}) == 1);
  CHECK(s.ctlSentPkts.count(PacketId{1}) == 1);
  CHECK(s.controller.ctlOutgoingPk.empty());
  const Message& pkout = s.messageStore.at(MessageId{1});
  CHECK(pkout.kind == MessageKind::PKOut);
  CHECK(pkout.packetPayload == PacketId{1});
  CHECK(pkout.priority == 1);

  s = step(s, "sw_rcv_Msg(s1,m1)", defs);
  CHECK(s.secureChanDown.empty());
  CHECK(s.switches.at(SwitchId{1}).swIncomingMsg.count(MessageId{1}) == 1);

  // s1 matches h1 and queues the packet on its port towards s2.
  s = step(s, "sw_handlePkOut(s1,m1)", defs);
  CHECK(s.messageStore.count(MessageId{1}) == 0);
  CHECK(s.switches.at(SwitchId{1}).actionsQueues.at(PortId{1}) ==
        std::set<PacketId>{PacketId{1}});

  s = step(s, "sw_sendPckt2sw(s1,p1,s2)", defs);
  CHECK(s.switches.at(SwitchId{1}).actionsQueues.empty());
  CHECK(s.dataChan.count({PacketId{1}, SwitchId{2}}) == 1);
  CHECK(s.swSentPkts.count(PacketId{1}) == 1);

  // s2 has no rule for h1; the packet goes up under a fresh message id.
  CHECK(enabled_names(s, defs) ==
        std::set<std::string>{"sw_rcv_unmachingPkt(s2,p1,m2)"});
  s = step(s, "sw_rcv_unmachingPkt(s2,p1,m2)", defs);
  CHECK(s.dataChan.empty());
  CHECK(s.messageStore.at(MessageId{2}).kind == MessageKind::PacketIn);
  s = step(s, "sw_sndPk2ctrl(s2,m2)", defs);
  CHECK(s.secureChanUp.count({MessageId{2}, SwitchId{2}}) == 1);

  s = step(s, "ctl_rcvPacketIn(m2)", defs);
  CHECK(s.controller.ctlIncomingPk.at(PacketId{1}) == SwitchId{2});
  CHECK(s.messageStore.count(MessageId{2}) == 0);

  s = step(s, "ctl_decideRule(p1,e9)", defs);
  REQUIRE(s.controller.pendingOrders.size() == 1);
  const PendingOrder& order = s.controller.pendingOrders.front();
  CHECK(order.verb == MessageKind::Add);
  CHECK(order.target == SwitchId{2});
  CHECK(order.entry.id == EntryId{9});
  CHECK(order.entry.eHeader1 == Header{1});
  CHECK(order.entry.actions == std::set<PortId>{PortId{1}});
  CHECK(s.controller.ctlOutgoingPk == std::set<PacketId>{PacketId{1}});

  // Only the verb and target at the head of the order queue may be sent.
  const auto names = enabled_names(s, defs);
  CHECK(names.count("ctl_sendAdd(s2,e9,m3)") == 1);
  CHECK(names.count("ctl_sendModf(s2,e9,m3)") == 0);
  CHECK(names.count("ctl_sendDel(s2,e9,m3)") == 0);
  CHECK(names.count("ctl_sendAdd(s1,e9,m3)") == 0);

  s = step(s, "ctl_sendAdd(s2,e9,m3)", defs);
  CHECK(s.controller.pendingOrders.empty());
  CHECK(s.messageStore.at(MessageId{3}).kind == MessageKind::Add);
  s = step(s, "sw_rcv_Msg(s2,m3)", defs);
  s = step(s, "sw_newFTentry(s2,m3)", defs);
  CHECK(s.switches.at(SwitchId{2}).flowTable.count(EntryId{9}) == 1);
  CHECK(s.messageStore.count(MessageId{3}) == 0);
  // Installing the same id twice is not an option.
  CHECK(enabled_names(s, defs).count("sw_newFTentry(s2,m3)") == 0);
}

TEST_CASE("a barrier is answered urgently and under the same id") {
  const Scenario scenario = find_scenario("s3");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  GlobalState s = scenario.initial;

  s = step(s, "ctl_askBarrier(s1,m1)", defs);
  CHECK(s.controller.barrierAsks.empty());
  CHECK(s.controller.pendingBarrier == std::set<SwitchId>{SwitchId{1}});
  CHECK(s.messageStore.at(MessageId{1}).kind == MessageKind::Barrier);
  CHECK(s.messageStore.at(MessageId{1}).priority == 7);
  // One ask, one outstanding barrier: no second ask for s1.
  CHECK(enabled_names(s, defs).count("ctl_askBarrier(s1,m2)") == 0);

  s = step(s, "sw_rcv_Msg(s1,m1)", defs);
  s = step(s, "sw_barrierRp(s1,m1)", defs);
  const Message& ack = s.messageStore.at(MessageId{1});
  CHECK(ack.kind == MessageKind::BarrierAck);
  CHECK(s.switches.at(SwitchId{1}).swOMsg.count(MessageId{1}) == 1);

  s = step(s, "sw_sndMsg2ctrl(s1,m1)", defs);
  s = step(s, "ctl_rcvBarrierRp(m1)", defs);
  CHECK(s.controller.pendingBarrier.empty());
  CHECK(s.messageStore.count(MessageId{1}) == 0);
}

TEST_CASE("a status request is answered with the switch's status") {
  const Scenario scenario = find_scenario("s3");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  GlobalState s = scenario.initial;

  s = step(s, "ctl_askStatusMsg(s2,m1)", defs);
  CHECK(s.controller.statusAsks.empty());
  CHECK(s.controller.pendingStatus == std::set<SwitchId>{SwitchId{2}});
  s = step(s, "sw_rcv_Msg(s2,m1)", defs);
  s = step(s, "sw_statusRp(s2,m1)", defs);
  CHECK(s.messageStore.at(MessageId{1}).kind == MessageKind::StatusRep);
  CHECK(s.messageStore.at(MessageId{1}).statusPayload ==
        SwitchStatus::Active);
  s = step(s, "sw_sndMsg2ctrl(s2,m1)", defs);
  s = step(s, "ctl_rcvStatus(m1)", defs);
  CHECK(s.controller.pendingStatus.empty());
}

TEST_CASE("modf replaces an installed entry, del removes it") {
  const Scenario scenario = find_scenario("s2");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  GlobalState s = scenario.initial;

  s = step(s, "ctl_sendModf(s1,e1,m1)", defs);
  s = step(s, "sw_rcv_Msg(s1,m1)", defs);
  // The replacement must target an installed id.
  CHECK(enabled_names(s, defs).count("sw_newFTentry(s1,m1)") == 0);
  s = step(s, "sw_modFTentry(s1,m1)", defs);
  CHECK(s.switches.at(SwitchId{1}).flowTable.at(EntryId{1}).actions ==
        std::set<PortId>{PortId{3}});
}

TEST_CASE("below L1 a handled packet is a destination set, above a queue") {
  const Scenario scenario = find_scenario("s1");
  auto walk = [&](Level level) {
    const auto defs = event_defs(event_catalog(level, scenario.ctx));
    GlobalState s = scenario.initial;
    s = step(s, "ctl_havePacket(p1)", defs);
    s = step(s, "ctl_emitPkt(s1,p1,m1)", defs);
    if (level == Level::L1) {
      // No priorities yet at L1.
      CHECK_FALSE(s.messageStore.at(MessageId{1}).priority.has_value());
    }
    s = step(s, "sw_rcv_Msg(s1,m1)", defs);
    return step(s, "sw_handlePkOut(s1,m1)", defs);
  };
  const GlobalState l0 = walk(Level::L0);
  CHECK(l0.switches.at(SwitchId{1}).swOPk.at(PacketId{1}) ==
        std::set<SwitchId>{SwitchId{2}});
  CHECK(l0.switches.at(SwitchId{1}).actionsQueues.empty());
  const GlobalState l1 = walk(Level::L1);
  CHECK(l1.switches.at(SwitchId{1}).swOPk.empty());
  CHECK(l1.switches.at(SwitchId{1}).actionsQueues.at(PortId{1}) ==
        std::set<PacketId>{PacketId{1}});
}

TEST_CASE("only the smallest pool id is fresh unless branching is on") {
  Scenario scenario = find_scenario("s1");
  GlobalState s = scenario.initial;
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  s = step(s, "ctl_havePacket(p1)", defs);
  CHECK(enabled_names(s, defs).count("ctl_emitPkt(s1,p1,m2)") == 0);

  scenario.ctx.branchFreshIds = true;
  const auto branching = event_defs(event_catalog(Level::L2, scenario.ctx));
  const auto names = enabled_names(s, branching);
  CHECK(names.count("ctl_emitPkt(s1,p1,m1)") == 1);
  CHECK(names.count("ctl_emitPkt(s1,p1,m4)") == 1);
}

TEST_CASE("an entry fanning out to two ports reaches both switches") {
  Context ctx;
  ctx.portToSwitch = {{PortId{1}, SwitchId{2}},
                      {PortId{2}, SwitchId{3}},
                      {PortId{3}, SwitchId{1}}};
  ctx.defaultMintPort = PortId{1};
  GlobalState s;
  for (std::uint32_t i : {1u, 2u, 3u}) {
    s.switches[SwitchId{i}].id = SwitchId{i};
  }
  FlowEntry fan;
  fan.id = EntryId{1};
  fan.eHeader1 = Header{1};
  fan.actions = {PortId{1}, PortId{2}};
  s.switches.at(SwitchId{1}).flowTable[fan.id] = fan;
  s.packetStore[PacketId{1}] = Packet{PacketId{1}, Header{1}, {}};
  s.dataChan.insert({PacketId{1}, SwitchId{1}});

  const auto defs = event_defs(event_catalog(Level::L2, ctx));
  GlobalState t = step(s, "sw_rcv_machingPkt(s1,p1)", defs);
  CHECK(t.switches.at(SwitchId{1}).swIPk.at(PacketId{1}) == EntryId{1});
  t = step(t, "sw_fwdLookup(s1,p1)", defs);
  CHECK(t.switches.at(SwitchId{1}).actionsQueues.size() == 2);

  const auto names = enabled_names(t, defs);
  CHECK(names.count("sw_sendPckt2sw(s1,p1,s2)") == 1);
  CHECK(names.count("sw_sendPckt2sw(s1,p1,s3)") == 1);
  t = step(t, "sw_sendPckt2sw(s1,p1,s2)", defs);
  CHECK(t.switches.at(SwitchId{1}).actionsQueues.size() == 1);
  CHECK(t.dataChan.count({PacketId{1}, SwitchId{2}}) == 1);
  t = step(t, "sw_sendPckt2sw(s1,p1,s3)", defs);
  CHECK(t.switches.at(SwitchId{1}).actionsQueues.empty());
  CHECK(t.swSentPkts == std::set<PacketId>{PacketId{1}});
}

TEST_CASE("a forwarding decision is dropped once its entry is gone") {
  const Scenario scenario = find_scenario("s1");
  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  GlobalState s = scenario.initial;
  s.dataChan.insert({PacketId{1}, SwitchId{1}});
  s = step(s, "sw_rcv_machingPkt(s1,p1)", defs);
  // The rule disappears between lookup start and execution.
  s.switches.at(SwitchId{1}).flowTable.clear();
  s = step(s, "sw_fwdLookup(s1,p1)", defs);
  CHECK(s.switches.at(SwitchId{1}).actionsQueues.empty());
  CHECK_FALSE(packet_buffered(s.switches.at(SwitchId{1}), PacketId{1}));
}

TEST_CASE("at L3 a pending send suppresses lower activity on that switch") {
  const Scenario scenario = find_scenario("s1");
  const auto l2 = event_defs(event_catalog(Level::L2, scenario.ctx));
  const auto l3 = event_defs(event_catalog(Level::L3, scenario.ctx));

  // s1 has a packet ready to send and, at the same time, an Add to install.
  GlobalState s = scenario.initial;
  s.switches.at(SwitchId{1}).actionsQueues[PortId{1}] = {PacketId{1}};
  s.packetStore[PacketId{1}].id = PacketId{1};
  Message add;
  add.id = MessageId{9};
  add.kind = MessageKind::Add;
  add.priority = kind_priority(MessageKind::Add);
  FlowEntry entry;
  entry.id = EntryId{5};
  entry.eHeader1 = Header{2};
  entry.actions = {PortId{1}};
  add.entryPayload = entry;
  s.messageStore[add.id] = add;
  s.switches.at(SwitchId{1}).swIncomingMsg.insert(add.id);

  const auto before = enabled_names(s, l2);
  CHECK(before.count("sw_sendPckt2sw(s1,p1,s2)") == 1);
  CHECK(before.count("sw_newFTentry(s1,m9)") == 1);
  const auto after = enabled_names(s, l3);
  CHECK(after.count("sw_sendPckt2sw(s1,p1,s2)") == 1);
  CHECK(after.count("sw_newFTentry(s1,m9)") == 0);

  // The same Add on the other switch is not suppressed.
  GlobalState t = scenario.initial;
  t.messageStore[add.id] = add;
  t.switches.at(SwitchId{2}).swIncomingMsg.insert(add.id);
  t.switches.at(SwitchId{1}).actionsQueues[PortId{1}] = {PacketId{1}};
  CHECK(enabled_names(t, l3).count("sw_newFTentry(s2,m9)") == 1);
}

TEST_CASE("at L3 an incoming barrier suppresses ordinary processing") {
  const Scenario scenario = find_scenario("s1");
  const auto l2 = event_defs(event_catalog(Level::L2, scenario.ctx));
  const auto l3 = event_defs(event_catalog(Level::L3, scenario.ctx));

  GlobalState s = scenario.initial;
  Message barrier;
  barrier.id = MessageId{8};
  barrier.kind = MessageKind::Barrier;
  barrier.priority = kind_priority(MessageKind::Barrier);
  Message add;
  add.id = MessageId{9};
  add.kind = MessageKind::Add;
  add.priority = kind_priority(MessageKind::Add);
  FlowEntry entry;
  entry.id = EntryId{5};
  entry.eHeader1 = Header{2};
  entry.actions = {PortId{1}};
  add.entryPayload = entry;
  s.messageStore[barrier.id] = barrier;
  s.messageStore[add.id] = add;
  auto& sw = s.switches.at(SwitchId{1});
  sw.swIncomingMsg = {barrier.id, add.id};

  CHECK(enabled_names(s, l2).count("sw_newFTentry(s1,m9)") == 1);
  const auto after = enabled_names(s, l3);
  CHECK(after.count("sw_barrierRp(s1,m8)") == 1);
  CHECK(after.count("sw_newFTentry(s1,m9)") == 0);

  GlobalState t = step(s, "sw_barrierRp(s1,m8)", l3);
  CHECK(enabled_names(t, l3).count("sw_newFTentry(s1,m9)") == 1);
}

}  // namespace
}  // namespace sdnevb
