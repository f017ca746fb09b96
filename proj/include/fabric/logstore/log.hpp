/*
 * include/fabric/logstore/log.hpp
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
#include <memory>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "fabric/common/bytes.hpp"
#include "fabric/common/message_id.hpp"
#include "fabric/common/time.hpp"
#include "fabric/logstore/dedup_index.hpp"
#include "fabric/logstore/device.hpp"

namespace fabric::logstore {

inline constexpr std::uint32_t kDefaultDedupCapacity = 65536;

struct LogHeader {
  std::string name;
  std::uint32_t element_size = 0;
  std::uint64_t capacity = 0;
  Seq next_seq = 1;
  Seq earliest_seq = 1;
  std::uint32_t dedup_capacity = kDefaultDedupCapacity;
};

struct LogEntry {
  Seq seq = 0;
  Bytes payload;  // exact appended bytes, padding stripped
  MessageId message_id;
  SimTime created_at{0};
};

struct ScanResult {
  std::vector<LogEntry> entries;
  /// Set when part of the requested range was already evicted.
  bool truncated = false;
  /// First retained seq at the time of the scan.
  Seq earliest_retained = 0;
};

struct AppendResult {
  Seq seq = 0;
  bool duplicate = false;
};

struct LogOptions {
  std::uint32_t dedup_capacity = kDefaultDedupCapacity;
  /// Flush the device after every append (fdatasync for files).
  bool sync_each_append = false;
};

struct RecoveryReport {
  bool torn_record_discarded = false;
  bool adopted_unacknowledged_record = false;
  Seq discarded_seq = 0;
};

/// Fixed-element-size circular log. Sequence assignment, record write and
/// header update happen under one exclusive lock; reads share it.
class Log {
 public:
  static std::unique_ptr<Log> create(std::shared_ptr<Device> device, std::string name,
                                     std::uint32_t element_size, std::uint64_t capacity,
                                     LogOptions options = {});
  /// Reopens a persisted log, discarding a torn final record.
  static std::unique_ptr<Log> recover(std::shared_ptr<Device> device, LogOptions options = {});

  Log(const Log&) = delete;
  Log& operator=(const Log&) = delete;

  /// Appends a payload or, on a dedup hit, returns the seq originally
  /// assigned to `id` without writing anything.
  AppendResult append(std::span<const std::uint8_t> payload, const MessageId& id,
                      SimTime now = SimTime{0});
  LogEntry read(Seq seq) const;
  ScanResult scan(Seq from, Seq to) const;
  /// Dedup lookup without side effects on contents.
  std::optional<Seq> find_message(const MessageId& id) const;

  LogHeader header() const;
  const std::string& name() const { return header_.name; }
  std::uint32_t element_size() const;
  Seq next_seq() const;
  Seq earliest_seq() const;
  std::uint64_t size() const;  // retained entries

  /// Changes the element size, rewriting retained entries. Remote clients
  /// holding the old size in a cache will be rejected on their next append.
  void resize(std::uint32_t new_element_size);

  /// Appends that would evict a seq >= floor fail with log-full. 0 disables.
  void set_eviction_floor(Seq floor);
  Seq eviction_floor() const;

  const RecoveryReport& recovery_report() const { return recovery_; }

 private:
  Log(std::shared_ptr<Device> device, LogHeader header, LogOptions options);

  void write_header_locked();
  void write_record_locked(Seq seq, std::span<const std::uint8_t> payload, const MessageId& id,
                           SimTime now);
  std::optional<LogEntry> read_record_locked(Seq seq) const;
  void journal_eviction_locked(Seq seq, const MessageId& id);
  void load_dedup_locked();

  std::shared_ptr<Device> device_;
  LogHeader header_;
  LogOptions options_;
  mutable std::shared_mutex mu_;
  mutable DedupIndex dedup_;
  Seq eviction_floor_ = 0;
  RecoveryReport recovery_;
};

}  // namespace fabric::logstore
