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

#ifndef SDNEVB_IDS_HPP_
#define SDNEVB_IDS_HPP_

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace sdnevb {

// Identifier universes. A scenario declares a finite pool per sort; ids are
// small naturals rendered with a sort prefix: s1, p2, m3, e4, a5, h6.
template <char Prefix>
struct Id {
  std::uint32_t value = 0;
  auto operator<=>(const Id&) const = default;
  static constexpr char prefix() { return Prefix; }
};

using SwitchId = Id<'s'>;
using PacketId = Id<'p'>;
using MessageId = Id<'m'>;
using EntryId = Id<'e'>;
using PortId = Id<'a'>;  // port-action token
using Header = Id<'h'>;  // opaque comparable header token

template <char P>
std::string to_string(Id<P> id) {
  return std::string(1, P) + std::to_string(id.value);
}

template <char P>
std::optional<Id<P>> parse_id(std::string_view text) {
  if (text.size() < 2 || text[0] != P) return std::nullopt;
  std::uint32_t v = 0;
  for (char c : text.substr(1)) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + static_cast<std::uint32_t>(c - '0');
  }
  return Id<P>{v};
}

// Refinement levels of the model chain. L0 is the base machine; L1 adds ports
// and per-field packet headers, L2 adds message priorities, L3 strengthens
// guards with the switch-local scheduling order.
enum class Level { L0 = 0, L1 = 1, L2 = 2, L3 = 3 };

inline bool operator<(Level a, Level b) {
  return static_cast<int>(a) < static_cast<int>(b);
}
inline bool operator<=(Level a, Level b) {
  return static_cast<int>(a) <= static_cast<int>(b);
}

std::string to_string(Level level);
std::optional<Level> parse_level(std::string_view text);

}  // namespace sdnevb

#endif  // SDNEVB_IDS_HPP_
