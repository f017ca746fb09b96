/*
 * include/fabric/common/message_id.hpp
 *
 * Copyright 2026 The Fabric Simulator Authors
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

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <cstring>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>

namespace fabric {

/// 16-byte identifier of a logical message; the dedup key of every log.
struct MessageId {
  std::array<std::uint8_t, 16> bytes{};

  static MessageId random(std::mt19937_64& rng);
  static MessageId from_hex(std::string_view hex);

  std::string hex() const;
  bool is_zero() const;

  auto operator<=>(const MessageId&) const = default;
};

/// Deterministic id derivation: each part is length-prefixed before hashing
/// so ("ab","c") and ("a","bc") never collide.
class MessageIdBuilder {
 public:
  MessageIdBuilder& add(std::string_view part);
  MessageIdBuilder& add(std::uint64_t value);
  MessageIdBuilder& add(std::span<const std::uint8_t> bytes);
  MessageId finish() const;

 private:
  std::string buffer_;
};

struct MessageIdHash {
  std::size_t operator()(const MessageId& id) const noexcept {
    std::size_t h;
    std::memcpy(&h, id.bytes.data(), sizeof(h));
    return h;
  }
};

}  // namespace fabric
