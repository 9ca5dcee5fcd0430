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

#ifndef SDNEVB_STATE_HPP_
#define SDNEVB_STATE_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sdnevb/ids.hpp"

namespace sdnevb {

enum class SwitchStatus { Active, Inactive };

enum class MessageKind {
  PKOut,
  PacketIn,
  Add,
  Modf,
  Del,
  Barrier,
  BarrierAck,
  StatusReq,
  StatusRep,
};

std::string to_string(SwitchStatus s);
std::string to_string(MessageKind k);

// The nine per-field packet headers used for matching from L1 on.
inline constexpr int kPacketFieldCount = 9;
const std::array<std::string_view, kPacketFieldCount>& packet_field_names();

struct Packet {
  PacketId id;
  Header pHeader1;
  // Always stored; consulted by matching only from L1 on. Defaults to h0.
  std::array<Header, kPacketFieldCount> fields{};

  bool operator==(const Packet&) const = default;
};

struct FlowEntry {
  EntryId id;
  Header eHeader1;
  // Per-field match values; an absent field is a wildcard.
  std::array<std::optional<Header>, kPacketFieldCount> extraHeaders{};
  // Port-action tokens; destination switches are resolved through the
  // scenario's port-to-switch map. Non-empty for installed entries.
  std::set<PortId> actions;

  bool operator==(const FlowEntry&) const = default;
};

struct Message {
  MessageId id;
  MessageKind kind = MessageKind::PKOut;
  std::optional<PacketId> packetPayload;   // PKOut, PacketIn
  std::optional<FlowEntry> entryPayload;   // Add, Modf, Del
  std::optional<int> priority;             // present from L2 on
  std::optional<SwitchStatus> statusPayload;  // StatusRep

  bool operator==(const Message&) const = default;
};

struct SwitchState {
  SwitchId id;
  SwitchStatus status = SwitchStatus::Active;
  std::map<EntryId, FlowEntry> flowTable;
  std::set<MessageId> swIncomingMsg;
  // Received packets awaiting forwarding, each with the entry that matched it.
  std::map<PacketId, EntryId> swIPk;
  std::set<MessageId> swOMsg;
  // Outgoing packets with resolved destination switches (L0 routing).
  std::map<PacketId, std::set<SwitchId>> swOPk;
  // Outgoing packets queued per port-action token (L1+ routing).
  std::map<PortId, std::set<PacketId>> actionsQueues;

  bool operator==(const SwitchState&) const = default;
};

// A control order the controller has decided but not yet sent. Scenario files
// may seed these; ctl_decideRule appends its own. verb is Add, Modf or Del.
struct PendingOrder {
  MessageKind verb = MessageKind::Add;
  SwitchId target;
  FlowEntry entry;

  bool operator==(const PendingOrder&) const = default;
};

struct ControllerState {
  // Packets lifted from PacketIn messages, each with its origin switch.
  std::map<PacketId, SwitchId> ctlIncomingPk;
  std::set<PacketId> ctlOutgoingPk;
  std::vector<PendingOrder> pendingOrders;  // FIFO
  // Remaining scenario-declared barrier/status requests, and the switches
  // whose reply is still outstanding.
  std::multiset<SwitchId> barrierAsks;
  std::set<SwitchId> pendingBarrier;
  std::multiset<SwitchId> statusAsks;
  std::set<SwitchId> pendingStatus;

  bool operator==(const ControllerState&) const = default;
};

struct Pools {
  std::set<PacketId> packets;    // environment packets not yet injected
  std::set<MessageId> messages;  // unused mintable message ids
  std::set<EntryId> entries;     // unused mintable entry ids

  bool operator==(const Pools&) const = default;
};

struct GlobalState {
  std::map<SwitchId, SwitchState> switches;
  ControllerState controller;
  // Directed views of the secure channel, plus the switch-to-switch data
  // channel. Pairs are (id, switch); ids are unique in flight.
  std::set<std::pair<MessageId, SwitchId>> secureChanDown;
  std::set<std::pair<MessageId, SwitchId>> secureChanUp;
  std::set<std::pair<PacketId, SwitchId>> dataChan;
  // Ghost history: packets ever emitted by the controller / ever placed on
  // the data channel by a switch.
  std::set<PacketId> ctlSentPkts;
  std::set<PacketId> swSentPkts;
  Pools pools;
  std::map<MessageId, Message> messageStore;
  std::map<PacketId, Packet> packetStore;

  bool operator==(const GlobalState&) const = default;
};

struct Violation {
  std::string invariant;
  std::vector<std::string> offenders;

  bool operator==(const Violation&) const = default;
};

// Evaluates the typing invariants; an empty result means the state is
// well-formed at the given level. Each violation names the invariant and the
// offending ids.
std::vector<Violation> typing_invariants(const GlobalState& state, Level level);

// Matching. L0 compares eHeader1 with pHeader1 only; from L1 on every
// non-wildcard extra field must also equal the packet's field. Among several
// matching entries the one with the lowest entry id wins.
std::optional<FlowEntry> match_entry(const SwitchState& sw, const Packet& pkt,
                                     Level level);

// True when the packet sits in any of the switch's packet buffers
// (swIPk, swOPk or an actions queue).
bool packet_buffered(const SwitchState& sw, PacketId pkt);

// Canonical textual form: fixed field order, all sets and maps sorted by id.
// Equal states serialize identically; everything downstream (hashing, digests,
// the visited set, trace files) is built on this.
std::string canonical_serialize(const GlobalState& state);

std::uint64_t fnv1a64(std::string_view text);

// 16 lowercase hex chars of the FNV-1a hash of the canonical form.
std::string state_digest(const GlobalState& state);

// Named state components in canonical form. Switch-local fields appear once
// under their generic name ("flowTable", "swIPk", ...) with all switches
// folded in; used for frame checking against declared write sets.
std::map<std::string, std::string> state_fields(const GlobalState& state);

// Names of the components on which the two states differ.
std::set<std::string> diff_fields(const GlobalState& a, const GlobalState& b);

}  // namespace sdnevb

#endif  // SDNEVB_STATE_HPP_
