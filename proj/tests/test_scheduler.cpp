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

#include <string>
#include <vector>

#include "doctest.h"
#include "sdnevb/events.hpp"
#include "sdnevb/scenario.hpp"
#include "sdnevb/scheduler.hpp"

namespace sdnevb {
namespace {

EventInstance inst(const std::string& text) {
  auto parsed = parse_instance(text);
  REQUIRE_MESSAGE(parsed.has_value(), text);
  return *parsed;
}

std::set<EventInstance> insts(const std::vector<std::string>& texts) {
  std::set<EventInstance> out;
  for (const auto& t : texts) out.insert(inst(t));
  return out;
}

TEST_CASE("the closure of the switch order ranks every affected event") {
  const auto above = transitive_closure(l3_priority_order());
  using Set = std::set<std::string>;
  CHECK(above.at("sw_sndPk2ctrl") ==
        Set{"sw_sendPckt2sw", "sw_newFTentry", "sw_delFTentry", "sw_barrierRp"});
  CHECK(above.at("sw_newFTentry") ==
        Set{"sw_sendPckt2sw", "sw_delFTentry", "sw_barrierRp"});
  CHECK(above.at("sw_sendPckt2sw") == Set{"sw_delFTentry", "sw_barrierRp"});
  CHECK(above.at("sw_modFTentry") == Set{"sw_barrierRp"});
  CHECK(above.at("sw_delFTentry") == Set{"sw_barrierRp"});
  CHECK(above.at("sw_handlePkOut") == Set{"sw_barrierRp"});
  CHECK(above.at("sw_statusRp") == Set{"sw_barrierRp"});
  CHECK(above.size() == 7);
  CHECK(above.count("sw_barrierRp") == 0);
}

TEST_CASE("a cyclic order is rejected") {
  PriorityOrder cyclic;
  cyclic.pairs = {{"a", "b"}, {"b", "c"}, {"c", "a"}};
  CHECK_THROWS_AS(transitive_closure(cyclic), CyclicOrder);
  PriorityOrder reflexive;
  reflexive.pairs = {{"a", "a"}};
  CHECK_THROWS_AS(transitive_closure(reflexive), CyclicOrder);
}

TEST_CASE("an outranked instance is dropped only on its own switch") {
  const PriorityOrder order = l3_priority_order();
  CHECK(filter_priority(insts({"sw_sendPckt2sw(s1,p1,s2)",
                               "sw_newFTentry(s1,m9)"}),
                        order) == insts({"sw_sendPckt2sw(s1,p1,s2)"}));
  // The same pair on different switches stays intact.
  const auto cross =
      insts({"sw_sendPckt2sw(s1,p1,s2)", "sw_newFTentry(s2,m9)"});
  CHECK(filter_priority(cross, order) == cross);
  // Controller instances carry no switch argument and pass through.
  const auto mixed = insts({"ctl_rcvPacketIn(m2)", "ctl_havePacket(p1)"});
  CHECK(filter_priority(mixed, order) == mixed);
}

TEST_CASE("filtering a full chain leaves its top element standing") {
  const auto chain = insts({
      "sw_sndPk2ctrl(s1,m1)",
      "sw_newFTentry(s1,m2)",
      "sw_sendPckt2sw(s1,p1,s2)",
      "sw_delFTentry(s1,m3)",
      "sw_barrierRp(s1,m4)",
  });
  CHECK(filter_priority(chain, l3_priority_order()) ==
        insts({"sw_barrierRp(s1,m4)"}));
}

TEST_CASE("messages leave a queue urgent first, oldest id first") {
  auto msg = [](std::uint32_t id, MessageKind kind, std::optional<int> prio) {
    Message m;
    m.id = MessageId{id};
    m.kind = kind;
    m.priority = prio;
    return m;
  };
  const std::vector<Message> queue = {
      msg(3, MessageKind::Add, 3),
      msg(2, MessageKind::Barrier, 7),
      msg(9, MessageKind::PacketIn, 0),
      msg(1, MessageKind::BarrierAck, 7),
  };
  const auto ordered = message_dequeue_order(queue);
  std::vector<std::uint32_t> ids;
  for (const auto& m : ordered) ids.push_back(m.id.value);
  CHECK(ids == std::vector<std::uint32_t>{1, 2, 3, 9});

  const std::vector<Message> unpriced = {msg(1, MessageKind::Add, {})};
  CHECK_THROWS_AS(message_dequeue_order(unpriced), MissingPriority);
}

TEST_CASE("the exhaustive policy declines to choose") {
  Scheduler sched{Exhaustive{}};
  const GlobalState state;
  CHECK_FALSE(sched.pick(insts({"ctl_havePacket(p1)"}), state).has_value());
  CHECK_THROWS_AS(Scheduler{SeededRandom{1}}.pick({}, state), EmptyChoice);
}

TEST_CASE("a seeded draw is replayable and stays inside the enabled set") {
  const auto enabled = insts({"ctl_havePacket(p1)", "ctl_havePacket(p2)",
                              "sw_rcv_Msg(s1,m1)", "sw_rcv_Msg(s2,m1)"});
  const GlobalState state;
  std::vector<std::string> first, second;
  for (int round = 0; round < 8; ++round) {
    Scheduler a{SeededRandom{42}};
    first.push_back(to_string(*a.pick(enabled, state)));
  }
  Scheduler a{SeededRandom{42}}, b{SeededRandom{42}};
  for (int round = 0; round < 8; ++round) {
    const auto pa = *a.pick(enabled, state);
    const auto pb = *b.pick(enabled, state);
    CHECK(pa == pb);
    CHECK(enabled.count(pa) == 1);
    second.push_back(to_string(pa));
  }
  // A fresh scheduler restarts the stream; a shared one advances it.
  CHECK(first.front() == second.front());
}

TEST_CASE("the priority policy serves the most urgent message on a switch") {
  // An installed-entry Modf (priority 4) and a fresh Add (priority 3) both
  // sit in s1's inbox; the Modf must win for every seed.
  const Scenario scenario = find_scenario("s1");
  GlobalState s = scenario.initial;
  Message modf;
  modf.id = MessageId{7};
  modf.kind = MessageKind::Modf;
  modf.priority = kind_priority(MessageKind::Modf);
  FlowEntry replacement;
  replacement.id = EntryId{1};
  replacement.eHeader1 = Header{1};
  replacement.actions = {PortId{1}};
  modf.entryPayload = replacement;
  Message add;
  add.id = MessageId{9};
  add.kind = MessageKind::Add;
  add.priority = kind_priority(MessageKind::Add);
  FlowEntry fresh;
  fresh.id = EntryId{5};
  fresh.eHeader1 = Header{2};
  fresh.actions = {PortId{1}};
  add.entryPayload = fresh;
  s.messageStore[modf.id] = modf;
  s.messageStore[add.id] = add;
  s.switches.at(SwitchId{1}).swIncomingMsg = {modf.id, add.id};

  const auto defs = event_defs(event_catalog(Level::L2, scenario.ctx));
  const auto enabled = [&] {
    std::set<EventInstance> out;
    for (const auto& i : enabled_instances(s, defs)) out.insert(i);
    return out;
  }();
  REQUIRE(enabled.count(inst("sw_modFTentry(s1,m7)")) == 1);
  REQUIRE(enabled.count(inst("sw_newFTentry(s1,m9)")) == 1);
  for (std::uint64_t seed : {0ULL, 1ULL, 7ULL, 42ULL, 1234ULL}) {
    Scheduler sched{PriorityThenSeed{seed}};
    const auto picked = sched.pick(enabled, s);
    REQUIRE(picked.has_value());
    CHECK(to_string(*picked) != "sw_newFTentry(s1,m9)");
  }
}

TEST_CASE("the priority policy also honours the switch event order") {
  // A queued forward outranks installing an entry on the same switch.
  const Scenario scenario = find_scenario("s1");
  GlobalState s = scenario.initial;
  s.switches.at(SwitchId{1}).actionsQueues[PortId{1}] = {PacketId{1}};
  Message add;
  add.id = MessageId{9};
  add.kind = MessageKind::Add;
  add.priority = kind_priority(MessageKind::Add);
  FlowEntry fresh;
  fresh.id = EntryId{5};
  fresh.eHeader1 = Header{2};
  fresh.actions = {PortId{1}};
  add.entryPayload = fresh;
  s.messageStore[add.id] = add;
  s.switches.at(SwitchId{1}).swIncomingMsg = {add.id};

  const auto enabled = insts({"sw_sendPckt2sw(s1,p1,s2)",
                              "sw_newFTentry(s1,m9)"});
  for (std::uint64_t seed : {0ULL, 3ULL, 99ULL}) {
    Scheduler sched{PriorityThenSeed{seed}};
    CHECK(to_string(*sched.pick(enabled, s)) == "sw_sendPckt2sw(s1,p1,s2)");
  }
}

}  // namespace
}  // namespace sdnevb
