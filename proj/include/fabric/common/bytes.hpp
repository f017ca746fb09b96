/*
 * include/fabric/common/bytes.hpp
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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fabric/common/message_id.hpp"

namespace fabric {

using Bytes = std::vector<std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline std::string to_string(std::span<const std::uint8_t> b) {
  return std::string(b.begin(), b.end());
}

/// Little-endian encoder appending to a growable buffer.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(Bytes& out) : out_(&out) {}

  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u16(std::uint16_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  ByteWriter& f64(double v);
  ByteWriter& raw(std::span<const std::uint8_t> b);
  ByteWriter& id(const MessageId& m) { return raw(m.bytes); }
  /// u16 length prefix followed by the bytes.
  ByteWriter& str16(std::string_view s);
  /// u32 length prefix followed by the bytes.
  ByteWriter& blob32(std::span<const std::uint8_t> b);
  ByteWriter& zeros(std::size_t n);

  Bytes& buffer() { return out_ ? *out_ : own_; }
  Bytes take() { return std::move(buffer()); }

 private:
  Bytes own_;
  Bytes* out_ = nullptr;
};

/// Little-endian decoder over a span. Throws Error(decode_error) on overrun.
class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  double f64();
  std::span<const std::uint8_t> raw(std::size_t n);
  MessageId id();
  std::string str16();
  Bytes blob32();
  void skip(std::size_t n) { raw(n); }

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

// Fixed-offset helpers for on-disk layouts.
void store_u32(std::span<std::uint8_t> dst, std::size_t off, std::uint32_t v);
void store_u64(std::span<std::uint8_t> dst, std::size_t off, std::uint64_t v);
std::uint32_t load_u32(std::span<const std::uint8_t> src, std::size_t off);
std::uint64_t load_u64(std::span<const std::uint8_t> src, std::size_t off);

}  // namespace fabric
