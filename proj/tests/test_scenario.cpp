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

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "sdnevb/scenario.hpp"

namespace sdnevb {
namespace {

const char* kBase = R"(# a two-switch line with one preinstalled rule
[switches]
s1 active
s2 inactive

[ports]
a1 -> s2

[entries]
e1 @ s1 : h1 [ipDst=h5] -> {a1}

[packets]
p1 : h1

[pools]
packets  = p1
messages = m1 m2
entries  = e9

[orders]
del @ s1 : e1

[run]
default-mint-port = a1
barrier-asks      = s1
status-asks       = s2
)";

TEST_CASE("a scenario file populates state, context and universes") {
  const Scenario sc = parse_scenario(kBase, "base");
  CHECK(sc.name == "base");

  REQUIRE(sc.initial.switches.size() == 2);
  CHECK(sc.initial.switches.at(SwitchId{1}).status == SwitchStatus::Active);
  CHECK(sc.initial.switches.at(SwitchId{2}).status == SwitchStatus::Inactive);

  CHECK(sc.ctx.portToSwitch ==
        std::map<PortId, SwitchId>{{PortId{1}, SwitchId{2}}});
  CHECK(sc.ctx.defaultMintPort == PortId{1});
  CHECK_FALSE(sc.ctx.branchFreshIds);

  const FlowEntry& e1 = sc.initial.switches.at(SwitchId{1}).flowTable.at(
      EntryId{1});
  CHECK(e1.eHeader1 == Header{1});
  CHECK(e1.actions == std::set<PortId>{PortId{1}});
  int extras = 0;
  for (int i = 0; i < kPacketFieldCount; ++i) {
    if (e1.extraHeaders[i].has_value()) {
      ++extras;
      CHECK(packet_field_names()[i] == "ipDst");
      CHECK(*e1.extraHeaders[i] == Header{5});
    }
  }
  CHECK(extras == 1);

  const Packet& p1 = sc.initial.packetStore.at(PacketId{1});
  CHECK(p1.pHeader1 == Header{1});
  for (const Header& h : p1.fields) CHECK(h == Header{0});

  CHECK(sc.initial.pools.packets == std::set<PacketId>{PacketId{1}});
  CHECK(sc.initial.pools.messages ==
        std::set<MessageId>{MessageId{1}, MessageId{2}});
  CHECK(sc.initial.pools.entries == std::set<EntryId>{EntryId{9}});

  REQUIRE(sc.initial.controller.pendingOrders.size() == 1);
  const PendingOrder& order = sc.initial.controller.pendingOrders.front();
  CHECK(order.verb == MessageKind::Del);
  CHECK(order.target == SwitchId{1});
  CHECK(order.entry.id == EntryId{1});
  CHECK(order.entry.actions.empty());

  CHECK(sc.initial.controller.barrierAsks ==
        std::multiset<SwitchId>{SwitchId{1}});
  CHECK(sc.initial.controller.statusAsks ==
        std::multiset<SwitchId>{SwitchId{2}});

  CHECK(sc.headerUniverse == std::vector<Header>{Header{1}, Header{5}});
  CHECK(sc.portUniverse == std::vector<PortId>{PortId{1}});
}

TEST_CASE("parse errors name the offending line") {
  auto expect_line = [](const std::string& text, const std::string& lineTag) {
    try {
      parse_scenario(text, "bad");
      FAIL_CHECK("expected a parse error for: " << text);
    } catch (const ScenarioParseError& err) {
      CHECK_MESSAGE(std::string(err.what()).find(lineTag) == 0,
                    err.what() << " (wanted " << lineTag << ")");
    }
  };
  expect_line("[switches]\ns1 sideways\n", "line 2");
  expect_line("[nosuch]\n", "line 1");
  expect_line("s1 active\n", "line 1");
  expect_line("[switches]\ns1 active\n[ports]\nfoo -> s2\n", "line 4");
  expect_line("[switches]\ns1 active\n[run]\nwarp = 9\n", "line 4");
  expect_line("[switches]\ns1 active\n[pools]\npackets p1\n", "line 4");
}

TEST_CASE("consistency rules are enforced after parsing") {
  auto expect_rule = [](std::string text, const std::string& rule) {
    try {
      parse_scenario(text, "bad");
      FAIL_CHECK("expected a validation error: " << rule);
    } catch (const ScenarioValidationError& err) {
      CHECK_MESSAGE(std::string(err.what()).find(rule) != std::string::npos,
                    err.what() << " (wanted " << rule << ")");
    }
  };
  expect_rule("", "at least one switch");
  expect_rule("[switches]\ns1 active\n[ports]\na1 -> s9\n",
              "ports wired to known switches");
  expect_rule("[switches]\ns1 active\n[entries]\ne1 @ s9 : h1 -> {a1}\n",
              "targets unknown");
  expect_rule(
      "[switches]\ns1 active\n[ports]\na1 -> s1\n"
      "[entries]\ne1 @ s1 : h1 -> {a1}\ne1 @ s1 : h2 -> {a1}\n",
      "duplicate entry");
  expect_rule("[switches]\ns1 active\n[entries]\ne1 @ s1 : h1 -> {a7}\n",
              "entry ports wired");
  expect_rule("[switches]\ns1 active\n[pools]\npackets = p9\n",
              "pool packets declared");
  expect_rule("[switches]\ns1 active\n[run]\nbarrier-asks = s7\n",
              "asks reference known switches");
  expect_rule(
      "[switches]\ns1 active\n[ports]\na1 -> s1\n[pools]\nentries = e9\n"
      "[run]\ndefault-mint-port = a4\n",
      "default mint port wired");
  expect_rule(
      "[switches]\ns1 active\n[ports]\na1 -> s1\n"
      "[entries]\ne1 @ s1 : h1 -> {a1}\n[pools]\nentries = e1\n",
      "pool entry ids fresh");
  expect_rule("[switches]\ns1 active\n[orders]\nadd @ s9 : e5 h1 -> {a1}\n",
              "order targets exist");
}

TEST_CASE("scenarios load from files and resolve through the search path") {
  const auto dir = std::filesystem::temp_directory_path() / "sdnevb-scn-test";
  std::filesystem::create_directories(dir);
  const auto file = dir / "tiny.scn";
  {
    std::ofstream out(file);
    out << "[switches]\ns1 active\n";
  }
  const Scenario fromFile = load_scenario(file);
  CHECK(fromFile.name == "tiny");
  CHECK(fromFile.initial.switches.size() == 1);

  // The shipped scenarios resolve by bare name via SDN_EVB_SCENARIOS.
  CHECK(find_scenario("s1").name == "s1");
  CHECK(find_scenario("s1.scn").name == "s1");
  CHECK_THROWS_AS(find_scenario("definitely-not-here"), ScenarioParseError);
  CHECK_THROWS_AS(load_scenario(dir / "missing.scn"), ScenarioParseError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("the shipped scenarios parse, validate and stay distinct") {
  std::set<std::string> digests;
  for (const std::string name : {"s0", "s1", "s2", "s3"}) {
    const Scenario sc = find_scenario(name);
    CHECK(sc.name == name);
    CHECK(typing_invariants(sc.initial, Level::L3).empty());
    CHECK(digests.insert(canonical_serialize(sc.initial)).second);
  }
}

}  // namespace
}  // namespace sdnevb
