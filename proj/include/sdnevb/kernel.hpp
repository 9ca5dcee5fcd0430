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

#ifndef SDNEVB_KERNEL_HPP_
#define SDNEVB_KERNEL_HPP_

#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnevb/state.hpp"

namespace sdnevb {

// Guarded-event machine over GlobalState: an event is enabled for a binding
// of its parameters when its guard holds; firing applies the substitution.
// Guards and actions are pure; actions return the successor state.

enum class Sort { Switch, Packet, Message, Entry, Port, Hdr, Token };

std::string to_string(Sort sort);

// A typed parameter value. Token carries small naturals (switch status in
// synthesized events: 0 = Active, 1 = Inactive).
struct Value {
  Sort sort = Sort::Switch;
  std::uint32_t raw = 0;

  auto operator<=>(const Value&) const = default;

  static Value of(SwitchId id) { return {Sort::Switch, id.value}; }
  static Value of(PacketId id) { return {Sort::Packet, id.value}; }
  static Value of(MessageId id) { return {Sort::Message, id.value}; }
  static Value of(EntryId id) { return {Sort::Entry, id.value}; }
  static Value of(PortId id) { return {Sort::Port, id.value}; }
  static Value of(Header id) { return {Sort::Hdr, id.value}; }
  static Value token(std::uint32_t v) { return {Sort::Token, v}; }

  SwitchId as_switch() const { return SwitchId{raw}; }
  PacketId as_packet() const { return PacketId{raw}; }
  MessageId as_message() const { return MessageId{raw}; }
  EntryId as_entry() const { return EntryId{raw}; }
  PortId as_port() const { return PortId{raw}; }
  Header as_header() const { return Header{raw}; }
};

std::string to_string(const Value& v);
std::optional<Value> parse_value(std::string_view text);

using Guard = std::function<bool(const GlobalState&, const std::vector<Value>&)>;
using Action =
    std::function<GlobalState(const GlobalState&, const std::vector<Value>&)>;

struct EventDef {
  std::string name;
  std::vector<Sort> parameterSorts;
  Guard guard;
  Action action;
  // Optional per-parameter domain override. When empty, parameter domains are
  // derived from the state (see sort_domain); Port/Hdr/Token parameters always
  // need an override.
  std::vector<std::vector<Value>> domains;
};

struct EventInstance {
  std::string eventName;
  std::vector<Value> arguments;

  auto operator<=>(const EventInstance&) const = default;
};

// "ctl_emitPkt(s1,p1,m1)"
std::string to_string(const EventInstance& inst);
std::optional<EventInstance> parse_instance(std::string_view text);

struct TraceStep {
  EventInstance instance;
  GlobalState after;

  bool operator==(const TraceStep&) const = default;
};

struct Trace {
  GlobalState initial;
  std::vector<TraceStep> steps;

  bool operator==(const Trace&) const = default;
};

struct KernelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownEvent : KernelError {
  using KernelError::KernelError;
};
struct GuardViolation : KernelError {
  using KernelError::KernelError;
};
struct ArityMismatch : KernelError {
  using KernelError::KernelError;
};

// Values a parameter of the given sort ranges over in this state: ids known
// to the stores plus unused pool ids (fresh candidates). Guards do the actual
// admission; the domain only has to be finite and complete.
std::vector<Value> sort_domain(const GlobalState& state, Sort sort);

// All instances whose guard holds. Deterministic: equal inputs produce equal
// sets. An empty result on every event means deadlock.
std::set<EventInstance> enabled_instances(const GlobalState& state,
                                          const std::vector<EventDef>& catalogue);

// Fires one instance. Throws UnknownEvent, ArityMismatch or GuardViolation;
// otherwise returns the successor state and leaves the input untouched.
GlobalState apply(const GlobalState& state, const EventInstance& instance,
                  const std::vector<EventDef>& catalogue);

bool detect_deadlock(const GlobalState& state,
                     const std::vector<EventDef>& catalogue);

// Replays the trace: every step must have been enabled and must reproduce the
// recorded after-state.
bool validate_trace(const Trace& trace, const std::vector<EventDef>& catalogue);

}  // namespace sdnevb

#endif  // SDNEVB_KERNEL_HPP_
