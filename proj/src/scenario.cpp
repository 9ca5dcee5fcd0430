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

#include "sdnevb/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace sdnevb {

namespace {

std::string trim(std::string_view text) {
  const char* ws = " \t\r";
  auto begin = text.find_first_not_of(ws);
  if (begin == std::string_view::npos) return "";
  auto end = text.find_last_not_of(ws);
  return std::string(text.substr(begin, end - begin + 1));
}

std::vector<std::string> split_ws(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

[[noreturn]] void fail(int line, const std::string& what) {
  throw ScenarioParseError("line " + std::to_string(line) + ": " + what);
}

template <char P>
Id<P> need_id(const std::string& tok, int line, const std::string& what) {
  auto id = parse_id<P>(tok);
  if (!id) fail(line, "expected " + what + ", got '" + tok + "'");
  return *id;
}

int field_index(std::string_view name) {
  const auto& names = packet_field_names();
  for (int i = 0; i < kPacketFieldCount; ++i) {
    if (names[i] == name) return i;
  }
  return -1;
}

// Splits "lhs SEP rhs" once; returns false when SEP is absent.
bool split_once(const std::string& text, std::string_view sep,
                std::string& lhs, std::string& rhs) {
  auto pos = text.find(sep);
  if (pos == std::string::npos) return false;
  lhs = trim(text.substr(0, pos));
  rhs = trim(text.substr(pos + sep.size()));
  return true;
}

struct UniverseCollector {
  std::set<Header> headers;
  std::set<PortId> ports;
};

// "h1 [ipDst=h5, tpSrc=h2]" without the bracket part meaning all-wildcard.
void parse_match(const std::string& text, int line, Header& first,
                 std::array<std::optional<Header>, kPacketFieldCount>& extras,
                 UniverseCollector& seen) {
  std::string head = text;
  std::string bracket;
  auto open = text.find('[');
  if (open != std::string::npos) {
    auto close = text.find(']', open);
    if (close == std::string::npos) fail(line, "unterminated '['");
    head = trim(text.substr(0, open));
    bracket = text.substr(open + 1, close - open - 1);
    if (!trim(text.substr(close + 1)).empty()) {
      fail(line, "unexpected text after ']'");
    }
  }
  first = need_id<'h'>(head, line, "a header like h1");
  seen.headers.insert(first);
  if (bracket.empty()) return;
  std::istringstream in{bracket};
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string key, value;
    if (!split_once(item, "=", key, value)) {
      fail(line, "expected field=header inside '[...]'");
    }
    int idx = field_index(key);
    if (idx < 0) fail(line, "unknown packet field '" + key + "'");
    Header h = need_id<'h'>(value, line, "a header like h1");
    extras[idx] = h;
    seen.headers.insert(h);
  }
}

// "{a1, a2}" or "{}".
std::set<PortId> parse_ports(const std::string& text, int line,
                             UniverseCollector& seen) {
  std::string body = trim(text);
  if (body.size() < 2 || body.front() != '{' || body.back() != '}') {
    fail(line, "expected a port set like {a1, a2}");
  }
  std::set<PortId> out;
  std::istringstream in{body.substr(1, body.size() - 2)};
  std::string item;
  while (std::getline(in, item, ',')) {
    std::string tok = trim(item);
    if (tok.empty()) continue;
    PortId port = need_id<'a'>(tok, line, "a port like a1");
    out.insert(port);
    seen.ports.insert(port);
  }
  return out;
}

// "e1 h1 [..] -> {a1}" (full) or "e1" alone when bodyOptional.
FlowEntry parse_entry(const std::string& text, int line, bool bodyOptional,
                      UniverseCollector& seen) {
  FlowEntry entry;
  std::string idTok = text;
  std::string rest;
  auto cut = text.find_first_of(" \t");
  if (cut != std::string::npos) {
    idTok = trim(text.substr(0, cut));
    rest = trim(text.substr(cut));
  }
  entry.id = need_id<'e'>(idTok, line, "an entry id like e1");
  if (rest.empty()) {
    if (!bodyOptional) fail(line, "entry needs 'header -> {ports}'");
    return entry;
  }
  std::string match, ports;
  if (!split_once(rest, "->", match, ports)) {
    fail(line, "entry needs '-> {ports}'");
  }
  parse_match(match, line, entry.eHeader1, entry.extraHeaders, seen);
  entry.actions = parse_ports(ports, line, seen);
  return entry;
}

std::string strip_comment(const std::string& raw) {
  auto pos = raw.find('#');
  return pos == std::string::npos ? raw : raw.substr(0, pos);
}

std::vector<std::string> env_dirs(const char* name) {
  std::vector<std::string> dirs;
  const char* value = std::getenv(name);
  if (value == nullptr) return dirs;
  std::string text = value;
  std::string item;
  std::istringstream in{text};
  while (std::getline(in, item, ':')) {
    std::istringstream sub{item};
    std::string piece;
    while (std::getline(sub, piece, ';')) {
      if (!piece.empty()) dirs.push_back(piece);
    }
  }
  return dirs;
}

}  // namespace

Scenario parse_scenario(std::string_view text, std::string name) {
  Scenario sc;
  sc.name = std::move(name);
  UniverseCollector seen;
  std::vector<std::pair<SwitchId, FlowEntry>> installs;
  bool mintPortSet = false;

  static const std::set<std::string> sections = {
      "switches", "ports", "entries", "packets", "pools", "orders", "run"};
  std::string section;
  int lineNo = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineNo;
    std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(lineNo, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (sections.count(section) == 0) {
        fail(lineNo, "unknown section [" + section + "]");
      }
      continue;
    }
    if (section.empty()) fail(lineNo, "content before any [section]");

    if (section == "switches") {
      auto toks = split_ws(line);
      SwitchId id = need_id<'s'>(toks[0], lineNo, "a switch like s1");
      SwitchState sw;
      sw.id = id;
      if (toks.size() > 1) {
        if (toks[1] == "active") {
          sw.status = SwitchStatus::Active;
        } else if (toks[1] == "inactive") {
          sw.status = SwitchStatus::Inactive;
        } else {
          fail(lineNo, "expected 'active' or 'inactive'");
        }
      }
      if (toks.size() > 2) fail(lineNo, "trailing tokens after status");
      if (!sc.initial.switches.emplace(id, sw).second) {
        fail(lineNo, to_string(id) + " declared twice");
      }
    } else if (section == "ports") {
      std::string lhs, rhs;
      if (!split_once(line, "->", lhs, rhs)) {
        fail(lineNo, "expected 'port -> switch'");
      }
      PortId port = need_id<'a'>(lhs, lineNo, "a port like a1");
      SwitchId sw = need_id<'s'>(rhs, lineNo, "a switch like s1");
      seen.ports.insert(port);
      if (!sc.ctx.portToSwitch.emplace(port, sw).second) {
        fail(lineNo, to_string(port) + " wired twice");
      }
    } else if (section == "entries") {
      std::string lhs, rhs;
      if (!split_once(line, "@", lhs, rhs)) {
        fail(lineNo, "expected 'entry @ switch : header -> {ports}'");
      }
      std::string swTok, body;
      if (!split_once(rhs, ":", swTok, body)) {
        fail(lineNo, "expected ': header -> {ports}' after the switch");
      }
      SwitchId sw = need_id<'s'>(swTok, lineNo, "a switch like s1");
      FlowEntry entry =
          parse_entry(trim(lhs) + " " + body, lineNo, false, seen);
      installs.emplace_back(sw, entry);
    } else if (section == "packets") {
      std::string idTok, body;
      if (!split_once(line, ":", idTok, body)) {
        fail(lineNo, "expected 'packet : header'");
      }
      Packet pkt;
      pkt.id = need_id<'p'>(idTok, lineNo, "a packet like p1");
      std::array<std::optional<Header>, kPacketFieldCount> extras{};
      parse_match(body, lineNo, pkt.pHeader1, extras, seen);
      for (int i = 0; i < kPacketFieldCount; ++i) {
        if (extras[i]) pkt.fields[i] = *extras[i];
      }
      if (!sc.initial.packetStore.emplace(pkt.id, pkt).second) {
        fail(lineNo, to_string(pkt.id) + " declared twice");
      }
    } else if (section == "pools") {
      std::string key, value;
      if (!split_once(line, "=", key, value)) {
        fail(lineNo, "expected 'packets|messages|entries = ids'");
      }
      auto toks = split_ws(value);
      if (key == "packets") {
        for (const auto& tok : toks) {
          sc.initial.pools.packets.insert(
              need_id<'p'>(tok, lineNo, "a packet like p1"));
        }
      } else if (key == "messages") {
        for (const auto& tok : toks) {
          sc.initial.pools.messages.insert(
              need_id<'m'>(tok, lineNo, "a message like m1"));
        }
      } else if (key == "entries") {
        for (const auto& tok : toks) {
          sc.initial.pools.entries.insert(
              need_id<'e'>(tok, lineNo, "an entry id like e1"));
        }
      } else {
        fail(lineNo, "unknown pool '" + key + "'");
      }
    } else if (section == "orders") {
      auto cut = line.find_first_of(" \t");
      if (cut == std::string::npos) fail(lineNo, "expected a full order");
      std::string verb = line.substr(0, cut);
      std::string lhs, rhs;
      if (!split_once(line.substr(cut), "@", lhs, rhs) || !lhs.empty()) {
        fail(lineNo, "expected 'verb @ switch : entry'");
      }
      std::string swTok, body;
      if (!split_once(rhs, ":", swTok, body)) {
        fail(lineNo, "expected ': entry' after the switch");
      }
      PendingOrder order;
      if (verb == "add") {
        order.verb = MessageKind::Add;
      } else if (verb == "modf") {
        order.verb = MessageKind::Modf;
      } else if (verb == "del") {
        order.verb = MessageKind::Del;
      } else {
        fail(lineNo, "unknown order verb '" + verb + "'");
      }
      order.target = need_id<'s'>(swTok, lineNo, "a switch like s1");
      order.entry =
          parse_entry(body, lineNo, order.verb == MessageKind::Del, seen);
      sc.initial.controller.pendingOrders.push_back(order);
    } else if (section == "run") {
      std::string key, value;
      if (!split_once(line, "=", key, value)) {
        fail(lineNo, "expected 'key = value'");
      }
      if (key == "default-mint-port") {
        sc.ctx.defaultMintPort =
            need_id<'a'>(value, lineNo, "a port like a1");
        seen.ports.insert(sc.ctx.defaultMintPort);
        mintPortSet = true;
      } else if (key == "branch-fresh-ids") {
        if (value == "true") {
          sc.ctx.branchFreshIds = true;
        } else if (value == "false") {
          sc.ctx.branchFreshIds = false;
        } else {
          fail(lineNo, "expected true or false");
        }
      } else if (key == "barrier-asks") {
        for (const auto& tok : split_ws(value)) {
          sc.initial.controller.barrierAsks.insert(
              need_id<'s'>(tok, lineNo, "a switch like s1"));
        }
      } else if (key == "status-asks") {
        for (const auto& tok : split_ws(value)) {
          sc.initial.controller.statusAsks.insert(
              need_id<'s'>(tok, lineNo, "a switch like s1"));
        }
      } else {
        fail(lineNo, "unknown run key '" + key + "'");
      }
    }
  }

  for (const auto& [sw, entry] : installs) {
    auto it = sc.initial.switches.find(sw);
    if (it == sc.initial.switches.end()) {
      throw ScenarioValidationError("entry " + to_string(entry.id) +
                                    " targets unknown " + to_string(sw));
    }
    if (!it->second.flowTable.emplace(entry.id, entry).second) {
      throw ScenarioValidationError("duplicate entry " + to_string(entry.id) +
                                    " on " + to_string(sw));
    }
  }
  if (!mintPortSet && !sc.ctx.portToSwitch.empty()) {
    sc.ctx.defaultMintPort = sc.ctx.portToSwitch.begin()->first;
  }
  sc.headerUniverse.assign(seen.headers.begin(), seen.headers.end());
  sc.portUniverse.assign(seen.ports.begin(), seen.ports.end());
  validate_scenario(sc);
  return sc;
}

void validate_scenario(const Scenario& sc) {
  auto bad = [](const std::string& rule, const std::string& detail) {
    throw ScenarioValidationError(rule + ": " + detail);
  };
  const GlobalState& s = sc.initial;
  if (s.switches.empty()) bad("at least one switch", sc.name);

  for (const auto& [port, sw] : sc.ctx.portToSwitch) {
    if (s.switches.count(sw) == 0) {
      bad("ports wired to known switches",
          to_string(port) + " -> " + to_string(sw));
    }
  }

  auto check_entry = [&](const FlowEntry& entry, const std::string& where,
                         bool needsActions) {
    if (needsActions && entry.actions.empty()) {
      bad("entry actions non-empty", where + " " + to_string(entry.id));
    }
    for (PortId port : entry.actions) {
      if (sc.ctx.portToSwitch.count(port) == 0) {
        bad("entry ports wired", where + " " + to_string(entry.id) + " uses " +
                                     to_string(port));
      }
    }
  };
  for (const auto& [id, sw] : s.switches) {
    for (const auto& [eid, entry] : sw.flowTable) {
      check_entry(entry, "installed on " + to_string(id), true);
    }
  }
  std::set<EntryId> orderIds;
  for (const auto& order : s.controller.pendingOrders) {
    if (s.switches.count(order.target) == 0) {
      bad("order targets exist", to_string(order.entry.id) + " @ " +
                                     to_string(order.target));
    }
    check_entry(order.entry, "ordered for " + to_string(order.target),
                order.verb != MessageKind::Del);
    orderIds.insert(order.entry.id);
  }

  for (PacketId pkt : s.pools.packets) {
    if (s.packetStore.count(pkt) == 0) {
      bad("pool packets declared", to_string(pkt));
    }
  }
  for (EntryId eid : s.pools.entries) {
    bool used = orderIds.count(eid) > 0;
    for (const auto& [id, sw] : s.switches) {
      used = used || sw.flowTable.count(eid) > 0;
    }
    if (used) bad("pool entry ids fresh", to_string(eid));
  }
  if (!s.pools.entries.empty() &&
      sc.ctx.portToSwitch.count(sc.ctx.defaultMintPort) == 0) {
    bad("default mint port wired", to_string(sc.ctx.defaultMintPort));
  }
  for (SwitchId sw : s.controller.barrierAsks) {
    if (s.switches.count(sw) == 0) bad("asks reference known switches",
                                       to_string(sw));
  }
  for (SwitchId sw : s.controller.statusAsks) {
    if (s.switches.count(sw) == 0) bad("asks reference known switches",
                                       to_string(sw));
  }

  auto violations = typing_invariants(s, Level::L3);
  if (!violations.empty()) {
    bad("initial state well-typed", violations.front().invariant);
  }
}

Scenario load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw ScenarioParseError("cannot open scenario file " + file.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), file.stem().string());
}

Scenario find_scenario(const std::string& name) {
  namespace fs = std::filesystem;
  std::vector<fs::path> candidates;
  for (const auto& dir : env_dirs("SDN_EVB_SCENARIOS")) {
    candidates.push_back(fs::path(dir) / name);
    candidates.push_back(fs::path(dir) / (name + ".scn"));
  }
  candidates.push_back(name);
  candidates.push_back(name + ".scn");
  for (const auto& path : candidates) {
    if (fs::exists(path) && fs::is_regular_file(path)) {
      return load_scenario(path);
    }
  }
  throw ScenarioParseError("scenario '" + name +
                           "' not found (searched SDN_EVB_SCENARIOS and the "
                           "working directory)");
}

}  // namespace sdnevb
