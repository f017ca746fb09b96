/*
 * include/fabric/transport/wire.hpp
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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include "fabric/common/bytes.hpp"
#include "fabric/common/error.hpp"
#include "fabric/common/message_id.hpp"
#include "fabric/logstore/dedup_index.hpp"

namespace fabric::transport {

using logstore::Seq;

// Frame layout: u32 LE length of everything after it, u8 type, then fields.
enum class FrameType : std::uint8_t {
  size_request = 0x01,
  size_reply = 0x02,
  append_request = 0x03,
  append_reply = 0x04,
};

enum class Status : std::uint8_t {
  ok = 0,
  unknown_log = 1,
  payload_too_large = 2,
  size_mismatch = 3,
  storage_failure = 4,
  log_full = 5,
  bad_request = 6,
};

std::string to_string(Status s);
Errc to_errc(Status s);

struct SizeRequest {
  std::uint64_t request_id = 0;
  std::string log_name;
  bool operator==(const SizeRequest&) const = default;
};

struct SizeReply {
  std::uint64_t request_id = 0;
  Status status = Status::ok;
  std::uint32_t element_size = 0;
  bool operator==(const SizeReply&) const = default;
};

struct AppendRequest {
  std::uint64_t request_id = 0;
  MessageId message_id;
  std::string log_name;
  /// The element size the client believes the log has.
  std::uint32_t element_size = 0;
  Bytes payload;
  bool operator==(const AppendRequest&) const = default;
};

struct AppendReply {
  std::uint64_t request_id = 0;
  Status status = Status::ok;
  Seq seq = 0;
  bool operator==(const AppendReply&) const = default;
};

using Frame = std::variant<SizeRequest, SizeReply, AppendRequest, AppendReply>;

inline constexpr std::size_t kLengthPrefix = 4;
/// Frames larger than this are rejected before allocation.
inline constexpr std::uint32_t kMaxFrame = 64u << 20;

Bytes encode(const Frame& frame);
/// Decodes one complete frame including its length prefix. Trailing or
/// missing bytes raise decode-error.
Frame decode(std::span<const std::uint8_t> bytes);

FrameType type_of(const Frame& frame);
std::uint64_t request_id_of(const Frame& frame);
bool is_request(const Frame& frame);

/// Reassembles frames from a byte stream.
class FrameAssembler {
 public:
  void feed(std::span<const std::uint8_t> bytes);
  /// Returns the next complete frame's bytes, if any.
  std::optional<Bytes> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  Bytes buf_;
};

}  // namespace fabric::transport
