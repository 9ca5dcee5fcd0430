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

#include "sdnevb/state.hpp"

#include <algorithm>
#include <sstream>

namespace sdnevb {

std::string to_string(Level level) {
  switch (level) {
    case Level::L0: return "L0";
    case Level::L1: return "L1";
    case Level::L2: return "L2";
    case Level::L3: return "L3";
  }
  return "L?";
}

std::optional<Level> parse_level(std::string_view text) {
  if (text == "L0") return Level::L0;
  if (text == "L1") return Level::L1;
  if (text == "L2") return Level::L2;
  if (text == "L3") return Level::L3;
  return std::nullopt;
}

std::string to_string(SwitchStatus s) {
  return s == SwitchStatus::Active ? "Active" : "Inactive";
}

std::string to_string(MessageKind k) {
  switch (k) {
    case MessageKind::PKOut: return "PKOut";
    case MessageKind::PacketIn: return "PacketIn";
    case MessageKind::Add: return "Add";
    case MessageKind::Modf: return "Modf";
    case MessageKind::Del: return "Del";
    case MessageKind::Barrier: return "Barrier";
    case MessageKind::BarrierAck: return "BarrierAck";
    case MessageKind::StatusReq: return "StatusReq";
    case MessageKind::StatusRep: return "StatusRep";
  }
  return "?";
}

const std::array<std::string_view, kPacketFieldCount>& packet_field_names() {
  static const std::array<std::string_view, kPacketFieldCount> names = {
      "macSrc", "macDst", "ipSrc",   "ipDst",   "ipProto",
      "tpSrc",  "tpDst",  "tpSrcPt", "tpDstPt",
  };
  return names;
}

std::optional<FlowEntry> match_entry(const SwitchState& sw, const Packet& pkt,
                                     Level level) {
  for (const auto& [id, entry] : sw.flowTable) {  // lowest entry id first
    if (entry.eHeader1 != pkt.pHeader1) continue;
    if (Level::L1 <= level) {
      bool ok = true;
      for (int i = 0; i < kPacketFieldCount; ++i) {
        if (entry.extraHeaders[i] && *entry.extraHeaders[i] != pkt.fields[i]) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
    }
    return entry;
  }
  return std::nullopt;
}

bool packet_buffered(const SwitchState& sw, PacketId pkt) {
  if (sw.swIPk.count(pkt) || sw.swOPk.count(pkt)) return true;
  for (const auto& [port, queue] : sw.actionsQueues) {
    if (queue.count(pkt)) return true;
  }
  return false;
}

namespace {

void put(std::string& out, std::string_view text) { out.append(text); }

template <char P>
void put(std::string& out, Id<P> id) {
  out.push_back(P);
  out.append(std::to_string(id.value));
}

void put(std::string& out, SwitchStatus s) {
  out.push_back(s == SwitchStatus::Active ? 'A' : 'I');
}

template <typename T>
void put_set(std::string& out, const std::set<T>& items) {
  out.push_back('{');
  bool first = true;
  for (const auto& item : items) {
    if (!first) out.push_back(',');
    first = false;
    put(out, item);
  }
  out.push_back('}');
}

template <typename T>
void put_multiset(std::string& out, const std::multiset<T>& items) {
  out.push_back('{');
  bool first = true;
  for (const auto& item : items) {
    if (!first) out.push_back(',');
    first = false;
    put(out, item);
  }
  out.push_back('}');
}

template <typename A, typename B>
void put_pair_set(std::string& out, const std::set<std::pair<A, B>>& items) {
  out.push_back('{');
  bool first = true;
  for (const auto& [a, b] : items) {
    if (!first) out.push_back(',');
    first = false;
    out.push_back('(');
    put(out, a);
    out.push_back(',');
    put(out, b);
    out.push_back(')');
  }
  out.push_back('}');
}

void put(std::string& out, const FlowEntry& e) {
  put(out, e.id);
  out.push_back(':');
  put(out, e.eHeader1);
  out.push_back('[');
  for (int i = 0; i < kPacketFieldCount; ++i) {
    if (i) out.push_back(',');
    if (e.extraHeaders[i]) {
      put(out, *e.extraHeaders[i]);
    } else {
      out.push_back('*');
    }
  }
  out.push_back(']');
  put_set(out, e.actions);
}

void put(std::string& out, const Packet& p) {
  put(out, p.id);
  out.push_back(':');
  put(out, p.pHeader1);
  out.push_back('[');
  for (int i = 0; i < kPacketFieldCount; ++i) {
    if (i) out.push_back(',');
    put(out, p.fields[i]);
  }
  out.push_back(']');
}

void put(std::string& out, const Message& m) {
  put(out, m.id);
  out.push_back(':');
  put(out, to_string(m.kind));
  if (m.packetPayload) {
    out.push_back('<');
    put(out, *m.packetPayload);
    out.push_back('>');
  }
  if (m.entryPayload) {
    out.push_back('<');
    put(out, *m.entryPayload);
    out.push_back('>');
  }
  if (m.priority) {
    out.append("!p");
    out.append(std::to_string(*m.priority));
  }
  if (m.statusPayload) {
    out.push_back('!');
    put(out, *m.statusPayload);
  }
}

void put(std::string& out, const PendingOrder& o) {
  put(out, to_string(o.verb));
  out.push_back('@');
  put(out, o.target);
  out.push_back(':');
  put(out, o.entry);
}

template <typename K, typename V>
void put_map(std::string& out, const std::map<K, V>& items) {
  out.push_back('{');
  bool first = true;
  for (const auto& [k, v] : items) {
    if (!first) out.push_back(',');
    first = false;
    put(out, k);
    out.push_back(':');
    put(out, v);
  }
  out.push_back('}');
}

template <typename K, typename V>
void put_map_of_sets(std::string& out, const std::map<K, std::set<V>>& items) {
  out.push_back('{');
  bool first = true;
  for (const auto& [k, vs] : items) {
    if (!first) out.push_back(',');
    first = false;
    put(out, k);
    out.push_back(':');
    put_set(out, vs);
  }
  out.push_back('}');
}

// Serializes one switch-local component across all switches, keyed by switch.
template <typename Fn>
std::string fold_switches(const GlobalState& s, Fn&& fn) {
  std::string out;
  bool first = true;
  for (const auto& [id, sw] : s.switches) {
    if (!first) out.push_back(';');
    first = false;
    put(out, id);
    out.push_back('=');
    fn(out, sw);
  }
  return out;
}

}  // namespace

std::map<std::string, std::string> state_fields(const GlobalState& s) {
  std::map<std::string, std::string> f;
  f["status"] = fold_switches(
      s, [](std::string& o, const SwitchState& sw) { put(o, sw.status); });
  f["flowTable"] = fold_switches(
      s, [](std::string& o, const SwitchState& sw) { put_map(o, sw.flowTable); });
  f["swIncomingMsg"] = fold_switches(s, [](std::string& o, const SwitchState& sw) {
    put_set(o, sw.swIncomingMsg);
  });
  f["swIPk"] = fold_switches(
      s, [](std::string& o, const SwitchState& sw) { put_map(o, sw.swIPk); });
  f["swOMsg"] = fold_switches(
      s, [](std::string& o, const SwitchState& sw) { put_set(o, sw.swOMsg); });
  f["swOPk"] = fold_switches(s, [](std::string& o, const SwitchState& sw) {
    put_map_of_sets(o, sw.swOPk);
  });
  f["actionsQueues"] = fold_switches(s, [](std::string& o, const SwitchState& sw) {
    put_map_of_sets(o, sw.actionsQueues);
  });

  std::string buf;
  put_map(buf, s.controller.ctlIncomingPk);
  f["ctlIncomingPk"] = std::move(buf);
  buf.clear();
  put_set(buf, s.controller.ctlOutgoingPk);
  f["ctlOutgoingPk"] = std::move(buf);
  buf.clear();
  buf.push_back('[');
  for (std::size_t i = 0; i < s.controller.pendingOrders.size(); ++i) {
    if (i) buf.push_back(',');
    put(buf, s.controller.pendingOrders[i]);
  }
  buf.push_back(']');
  f["pendingOrders"] = std::move(buf);
  buf.clear();
  put_multiset(buf, s.controller.barrierAsks);
  f["barrierAsks"] = std::move(buf);
  buf.clear();
  put_set(buf, s.controller.pendingBarrier);
  f["pendingBarrier"] = std::move(buf);
  buf.clear();
  put_multiset(buf, s.controller.statusAsks);
  f["statusAsks"] = std::move(buf);
  buf.clear();
  put_set(buf, s.controller.pendingStatus);
  f["pendingStatus"] = std::move(buf);

  buf.clear();
  put_pair_set(buf, s.secureChanDown);
  f["secureChanDown"] = std::move(buf);
  buf.clear();
  put_pair_set(buf, s.secureChanUp);
  f["secureChanUp"] = std::move(buf);
  buf.clear();
  put_pair_set(buf, s.dataChan);
  f["dataChan"] = std::move(buf);
  buf.clear();
  put_set(buf, s.ctlSentPkts);
  f["ctlSentPkts"] = std::move(buf);
  buf.clear();
  put_set(buf, s.swSentPkts);
  f["swSentPkts"] = std::move(buf);

  buf.clear();
  put_set(buf, s.pools.packets);
  f["pools.packets"] = std::move(buf);
  buf.clear();
  put_set(buf, s.pools.messages);
  f["pools.messages"] = std::move(buf);
  buf.clear();
  put_set(buf, s.pools.entries);
  f["pools.entries"] = std::move(buf);

  buf.clear();
  put_map(buf, s.messageStore);
  f["messageStore"] = std::move(buf);
  buf.clear();
  put_map(buf, s.packetStore);
  f["packetStore"] = std::move(buf);
  return f;
}

std::string canonical_serialize(const GlobalState& s) {
  std::string out;
  for (const auto& [name, value] : state_fields(s)) {
    out.append(name);
    out.push_back('=');
    out.append(value);
    out.push_back('\n');
  }
  return out;
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string state_digest(const GlobalState& s) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(canonical_serialize(s));
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = hex[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::set<std::string> diff_fields(const GlobalState& a, const GlobalState& b) {
  auto fa = state_fields(a);
  auto fb = state_fields(b);
  std::set<std::string> diff;
  for (const auto& [name, value] : fa) {
    auto it = fb.find(name);
    if (it == fb.end() || it->second != value) diff.insert(name);
  }
  for (const auto& [name, value] : fb) {
    if (!fa.count(name)) diff.insert(name);
  }
  return diff;
}

namespace {

void add_violation(std::vector<Violation>& out, const std::string& invariant,
                   std::vector<std::string> offenders) {
  std::sort(offenders.begin(), offenders.end());
  offenders.erase(std::unique(offenders.begin(), offenders.end()),
                  offenders.end());
  out.push_back(Violation{invariant, std::move(offenders)});
}

}  // namespace

std::vector<Violation> typing_invariants(const GlobalState& s, Level level) {
  std::vector<Violation> out;

  // Every message id on a channel or in a switch message buffer resolves in
  // the message store.
  {
    std::vector<std::string> missing;
    auto check = [&](MessageId m) {
      if (!s.messageStore.count(m)) missing.push_back(to_string(m));
    };
    for (const auto& [m, sw] : s.secureChanDown) check(m);
    for (const auto& [m, sw] : s.secureChanUp) check(m);
    for (const auto& [id, sw] : s.switches) {
      for (MessageId m : sw.swIncomingMsg) check(m);
      for (MessageId m : sw.swOMsg) check(m);
    }
    if (!missing.empty()) {
      add_violation(out, "message ids resolve in messageStore", missing);
    }
  }

  // Every packet id anywhere resolves in the packet store.
  {
    std::vector<std::string> missing;
    auto check = [&](PacketId p) {
      if (!s.packetStore.count(p)) missing.push_back(to_string(p));
    };
    for (const auto& [p, sw] : s.dataChan) check(p);
    for (PacketId p : s.controller.ctlOutgoingPk) check(p);
    for (const auto& [p, sw] : s.controller.ctlIncomingPk) check(p);
    for (PacketId p : s.pools.packets) check(p);
    for (PacketId p : s.ctlSentPkts) check(p);
    for (PacketId p : s.swSentPkts) check(p);
    for (const auto& [id, sw] : s.switches) {
      for (const auto& [p, e] : sw.swIPk) check(p);
      for (const auto& [p, dests] : sw.swOPk) check(p);
      for (const auto& [port, queue] : sw.actionsQueues) {
        for (PacketId p : queue) check(p);
      }
    }
    for (const auto& [m, msg] : s.messageStore) {
      if (msg.packetPayload) check(*msg.packetPayload);
    }
    if (!missing.empty()) {
      add_violation(out, "packet ids resolve in packetStore", missing);
    }
  }

  // Message kind determines which payload must be present.
  {
    std::vector<std::string> bad;
    for (const auto& [m, msg] : s.messageStore) {
      bool ok = true;
      switch (msg.kind) {
        case MessageKind::PKOut:
        case MessageKind::PacketIn:
          ok = msg.packetPayload.has_value();
          break;
        case MessageKind::Add:
        case MessageKind::Modf:
        case MessageKind::Del:
          ok = msg.entryPayload.has_value();
          break;
        case MessageKind::StatusRep:
          ok = msg.statusPayload.has_value();
          break;
        default:
          break;
      }
      if (!ok) bad.push_back(to_string(m));
    }
    if (!bad.empty()) add_violation(out, "message kind matches payload", bad);
  }

  // From L2 on, every message in flight carries a priority.
  if (Level::L2 <= level) {
    std::vector<std::string> bad;
    auto check = [&](MessageId m) {
      auto it = s.messageStore.find(m);
      if (it != s.messageStore.end() && !it->second.priority) {
        bad.push_back(to_string(m));
      }
    };
    for (const auto& [m, sw] : s.secureChanDown) check(m);
    for (const auto& [m, sw] : s.secureChanUp) check(m);
    for (const auto& [id, sw] : s.switches) {
      for (MessageId m : sw.swIncomingMsg) check(m);
      for (MessageId m : sw.swOMsg) check(m);
    }
    if (!bad.empty()) add_violation(out, "priority present at L2", bad);
  }

  // From L1 on, every installed entry has a non-empty actions set.
  if (Level::L1 <= level) {
    std::vector<std::string> bad;
    for (const auto& [id, sw] : s.switches) {
      for (const auto& [e, entry] : sw.flowTable) {
        if (entry.actions.empty()) {
          bad.push_back(to_string(id) + "." + to_string(e));
        }
      }
    }
    if (!bad.empty()) add_violation(out, "dom(actions)=dom(flowTable)", bad);
  }

  // A packet occupies at most one buffer per switch.
  {
    std::vector<std::string> bad;
    for (const auto& [id, sw] : s.switches) {
      std::map<PacketId, int> seen;
      for (const auto& [p, e] : sw.swIPk) seen[p]++;
      for (const auto& [p, dests] : sw.swOPk) seen[p]++;
      std::set<PacketId> queued;
      for (const auto& [port, queue] : sw.actionsQueues) {
        for (PacketId p : queue) queued.insert(p);
      }
      for (PacketId p : queued) seen[p]++;
      for (const auto& [p, n] : seen) {
        if (n > 1) bad.push_back(to_string(id) + "." + to_string(p));
      }
    }
    if (!bad.empty()) {
      add_violation(out, "per-switch packet buffers disjoint", bad);
    }
  }

  // A message id is in at most one place in flight.
  {
    std::map<MessageId, int> seen;
    for (const auto& [m, sw] : s.secureChanDown) seen[m]++;
    for (const auto& [m, sw] : s.secureChanUp) seen[m]++;
    for (const auto& [id, sw] : s.switches) {
      for (MessageId m : sw.swIncomingMsg) seen[m]++;
      for (MessageId m : sw.swOMsg) seen[m]++;
    }
    std::vector<std::string> bad;
    for (const auto& [m, n] : seen) {
      if (n > 1) bad.push_back(to_string(m));
    }
    if (!bad.empty()) add_violation(out, "message ids unique in flight", bad);
  }

  return out;
}

}  // namespace sdnevb
