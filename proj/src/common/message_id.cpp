/*
 * src/common/message_id.cpp
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

#include "fabric/common/message_id.hpp"

#include <sodium.h>

#include "fabric/common/error.hpp"

namespace fabric {

MessageId MessageId::random(std::mt19937_64& rng) {
  MessageId id;
  for (std::size_t i = 0; i < id.bytes.size(); i += 8) {
    const std::uint64_t v = rng();
    std::memcpy(id.bytes.data() + i, &v, 8);
  }
  return id;
}

MessageId MessageId::from_hex(std::string_view hex) {
  MessageId id;
  std::size_t written = 0;
  if (hex.size() != 32 ||
      sodium_hex2bin(id.bytes.data(), id.bytes.size(), hex.data(), hex.size(), nullptr, &written,
                     nullptr) != 0 ||
      written != id.bytes.size()) {
    throw Error(Errc::invalid_argument, "bad message id hex '" + std::string(hex) + "'");
  }
  return id;
}

std::string MessageId::hex() const {
  char out[33];
  sodium_bin2hex(out, sizeof(out), bytes.data(), bytes.size());
  return std::string(out, 32);
}

bool MessageId::is_zero() const {
  for (auto b : bytes) {
    if (b != 0) return false;
  }
  return true;
}

MessageIdBuilder& MessageIdBuilder::add(std::string_view part) {
  add(static_cast<std::uint64_t>(part.size()));
  buffer_.append(part);
  return *this;
}

MessageIdBuilder& MessageIdBuilder::add(std::uint64_t value) {
  for (int i = 0; i < 8; ++i) buffer_.push_back(static_cast<char>((value >> (8 * i)) & 0xff));
  return *this;
}

MessageIdBuilder& MessageIdBuilder::add(std::span<const std::uint8_t> bytes) {
  add(static_cast<std::uint64_t>(bytes.size()));
  buffer_.append(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  return *this;
}

MessageId MessageIdBuilder::finish() const {
  MessageId id;
  crypto_generichash(id.bytes.data(), id.bytes.size(),
                     reinterpret_cast<const unsigned char*>(buffer_.data()), buffer_.size(), nullptr,
                     0);
  return id;
}

}  // namespace fabric
