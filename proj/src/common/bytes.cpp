/*
 * src/common/bytes.cpp
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

#include "fabric/common/bytes.hpp"

#include <bit>
#include <cstring>

#include "fabric/common/error.hpp"

namespace fabric {

ByteWriter& ByteWriter::u8(std::uint8_t v) {
  buffer().push_back(v);
  return *this;
}

ByteWriter& ByteWriter::u16(std::uint16_t v) {
  u8(static_cast<std::uint8_t>(v & 0xff));
  return u8(static_cast<std::uint8_t>(v >> 8));
}

ByteWriter& ByteWriter::u32(std::uint32_t v) {
  for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  return *this;
}

ByteWriter& ByteWriter::u64(std::uint64_t v) {
  for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xff));
  return *this;
}

ByteWriter& ByteWriter::f64(double v) { return u64(std::bit_cast<std::uint64_t>(v)); }

ByteWriter& ByteWriter::raw(std::span<const std::uint8_t> b) {
  buffer().insert(buffer().end(), b.begin(), b.end());
  return *this;
}

ByteWriter& ByteWriter::str16(std::string_view s) {
  if (s.size() > 0xffff) throw Error(Errc::invalid_argument, "string too long for u16 prefix");
  u16(static_cast<std::uint16_t>(s.size()));
  buffer().insert(buffer().end(), s.begin(), s.end());
  return *this;
}

ByteWriter& ByteWriter::blob32(std::span<const std::uint8_t> b) {
  u32(static_cast<std::uint32_t>(b.size()));
  return raw(b);
}

ByteWriter& ByteWriter::zeros(std::size_t n) {
  buffer().insert(buffer().end(), n, 0);
  return *this;
}

std::span<const std::uint8_t> ByteReader::raw(std::size_t n) {
  if (n > remaining()) {
    throw Error(Errc::decode_error, "truncated input: need " + std::to_string(n) + " bytes, have " +
                                        std::to_string(remaining()));
  }
  auto out = in_.subspan(pos_, n);
  pos_ += n;
  return out;
}

std::uint8_t ByteReader::u8() { return raw(1)[0]; }

std::uint16_t ByteReader::u16() {
  auto b = raw(2);
  return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
}

std::uint32_t ByteReader::u32() {
  auto b = raw(4);
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

std::uint64_t ByteReader::u64() {
  auto b = raw(8);
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
  return v;
}

double ByteReader::f64() { return std::bit_cast<double>(u64()); }

MessageId ByteReader::id() {
  MessageId m;
  auto b = raw(m.bytes.size());
  std::memcpy(m.bytes.data(), b.data(), b.size());
  return m;
}

std::string ByteReader::str16() {
  const auto n = u16();
  auto b = raw(n);
  return std::string(b.begin(), b.end());
}

Bytes ByteReader::blob32() {
  const auto n = u32();
  auto b = raw(n);
  return Bytes(b.begin(), b.end());
}

void store_u32(std::span<std::uint8_t> dst, std::size_t off, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[off + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
}

void store_u64(std::span<std::uint8_t> dst, std::size_t off, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[off + i] = static_cast<std::uint8_t>((v >> (8 * i)) & 0xff);
}

std::uint32_t load_u32(std::span<const std::uint8_t> src, std::size_t off) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | src[off + i];
  return v;
}

std::uint64_t load_u64(std::span<const std::uint8_t> src, std::size_t off) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | src[off + i];
  return v;
}

}  // namespace fabric
