/*
 * include/fabric/logstore/format.hpp
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
#include <cstdint>
#include <string_view>

// On-disk layout of a log file. All integers little-endian.
//
//   header (128 bytes)
//     0   magic "XGFLOG01"
//     8   u32 version
//     12  u32 element_size
//     16  u64 capacity
//     24  u64 next_seq
//     32  u64 earliest_seq
//     40  u32 dedup_capacity
//     44  u16 name_len
//     46  name bytes (max 64)
//     110 reserved, zero
//     124 u32 crc32 of bytes [0, 124)
//
//   records, fixed stride 40 + element_size, slot = (seq - 1) % capacity
//     0   u64 seq
//     8   message id (16 bytes)
//     24  i64 created_at (simulated microseconds)
//     32  u32 payload_len
//     36  u32 crc32 of bytes [0, 36) followed by the padded payload
//     40  payload, zero-padded to element_size
//
//   dedup journal, dedup_capacity slots of 24 bytes after the last record slot
//     0   message id of an evicted entry
//     16  u64 its seq (0 = empty slot)
namespace fabric::logstore::format {

inline constexpr std::array<std::uint8_t, 8> kMagic = {'X', 'G', 'F', 'L', 'O', 'G', '0', '1'};
inline constexpr std::uint32_t kVersion = 1;
inline constexpr std::size_t kHeaderSize = 128;
inline constexpr std::size_t kHeaderCrcOffset = 124;
inline constexpr std::size_t kMaxNameLength = 64;
inline constexpr std::size_t kRecordHeaderSize = 40;
inline constexpr std::size_t kRecordCrcOffset = 36;
inline constexpr std::size_t kJournalSlotSize = 24;

inline constexpr std::uint64_t record_stride(std::uint32_t element_size) {
  return kRecordHeaderSize + element_size;
}

inline constexpr std::uint64_t record_offset(std::uint64_t seq, std::uint64_t capacity,
                                             std::uint32_t element_size) {
  return kHeaderSize + ((seq - 1) % capacity) * record_stride(element_size);
}

inline constexpr std::uint64_t journal_offset(std::uint64_t capacity, std::uint32_t element_size) {
  return kHeaderSize + capacity * record_stride(element_size);
}

}  // namespace fabric::logstore::format
