/*
 * src/logstore/log.cpp
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

#include "fabric/logstore/log.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <mutex>

#include "fabric/common/error.hpp"
#include "fabric/logstore/format.hpp"

namespace fabric::logstore {

namespace {

std::uint32_t crc(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b = {}) {
  uLong c = crc32(0L, Z_NULL, 0);
  c = crc32(c, a.data(), static_cast<uInt>(a.size()));
  if (!b.empty()) c = crc32(c, b.data(), static_cast<uInt>(b.size()));
  return static_cast<std::uint32_t>(c);
}

Bytes encode_header(const LogHeader& h) {
  Bytes buf(format::kHeaderSize, 0);
  std::span<std::uint8_t> s(buf);
  std::copy(format::kMagic.begin(), format::kMagic.end(), buf.begin());
  store_u32(s, 8, format::kVersion);
  store_u32(s, 12, h.element_size);
  store_u64(s, 16, h.capacity);
  store_u64(s, 24, h.next_seq);
  store_u64(s, 32, h.earliest_seq);
  store_u32(s, 40, h.dedup_capacity);
  buf[44] = static_cast<std::uint8_t>(h.name.size() & 0xff);
  buf[45] = static_cast<std::uint8_t>(h.name.size() >> 8);
  std::copy(h.name.begin(), h.name.end(), buf.begin() + 46);
  store_u32(s, format::kHeaderCrcOffset,
            crc(std::span<const std::uint8_t>(buf).first(format::kHeaderCrcOffset)));
  return buf;
}

LogHeader decode_header(std::span<const std::uint8_t> buf, const std::string& where) {
  auto fail = [&](const std::string& why) -> LogHeader {
    throw Error(Errc::corrupt_header, where + ": " + why);
  };
  if (buf.size() < format::kHeaderSize) return fail("file shorter than header");
  if (!std::equal(format::kMagic.begin(), format::kMagic.end(), buf.begin())) {
    return fail("bad magic");
  }
  if (load_u32(buf, format::kHeaderCrcOffset) != crc(buf.first(format::kHeaderCrcOffset))) {
    return fail("header checksum mismatch");
  }
  if (load_u32(buf, 8) != format::kVersion) return fail("unsupported version");
  LogHeader h;
  h.element_size = load_u32(buf, 12);
  h.capacity = load_u64(buf, 16);
  h.next_seq = load_u64(buf, 24);
  h.earliest_seq = load_u64(buf, 32);
  h.dedup_capacity = load_u32(buf, 40);
  const std::size_t name_len = buf[44] | (buf[45] << 8);
  if (name_len == 0 || name_len > format::kMaxNameLength) return fail("bad name length");
  h.name.assign(buf.begin() + 46, buf.begin() + 46 + static_cast<std::ptrdiff_t>(name_len));
  if (h.element_size == 0 || h.capacity == 0 || h.dedup_capacity == 0) {
    return fail("zero-sized field");
  }
  if (h.next_seq == 0 || h.earliest_seq == 0 || h.earliest_seq > h.next_seq ||
      h.next_seq - h.earliest_seq > h.capacity) {
    return fail("inconsistent sequence bounds");
  }
  return h;
}

void validate_shape(const std::string& name, std::uint32_t element_size, std::uint64_t capacity) {
  if (name.empty() || name.size() > format::kMaxNameLength) {
    throw Error(Errc::invalid_argument, "log name must be 1.." +
                                            std::to_string(format::kMaxNameLength) + " bytes");
  }
  if (element_size == 0) throw Error(Errc::invalid_size, "element_size must be >= 1");
  if (capacity == 0) throw Error(Errc::invalid_size, "capacity must be >= 1");
}

}  // namespace

Log::Log(std::shared_ptr<Device> device, LogHeader header, LogOptions options)
    : device_(std::move(device)),
      header_(std::move(header)),
      options_(options),
      dedup_(header_.dedup_capacity) {}

std::unique_ptr<Log> Log::create(std::shared_ptr<Device> device, std::string name,
                                 std::uint32_t element_size, std::uint64_t capacity,
                                 LogOptions options) {
  validate_shape(name, element_size, capacity);
  LogHeader h;
  h.name = std::move(name);
  h.element_size = element_size;
  h.capacity = capacity;
  h.dedup_capacity = options.dedup_capacity;
  std::unique_ptr<Log> log(new Log(std::move(device), std::move(h), options));
  log->device_->truncate(0);
  log->write_header_locked();
  log->device_->sync();
  return log;
}

std::unique_ptr<Log> Log::recover(std::shared_ptr<Device> device, LogOptions options) {
  Bytes hbuf(format::kHeaderSize);
  const auto got = device->read(0, hbuf);
  hbuf.resize(got);
  LogHeader h = decode_header(hbuf, device->describe());
  options.dedup_capacity = h.dedup_capacity;
  std::unique_ptr<Log> log(new Log(std::move(device), h, options));
  auto& hd = log->header_;
  bool header_dirty = false;

  // A record written but not yet acknowledged by a header update is adopted;
  // its seq may already be known to the writer's dedup retry.
  if (auto rec = log->read_record_locked(hd.next_seq)) {
    if (hd.next_seq - hd.earliest_seq == hd.capacity) ++hd.earliest_seq;
    ++hd.next_seq;
    log->recovery_.adopted_unacknowledged_record = true;
    header_dirty = true;
  } else if (hd.next_seq - hd.earliest_seq == hd.capacity && hd.capacity > 0 &&
             !log->read_record_locked(hd.earliest_seq)) {
    // Torn write into the slot of the entry it was evicting.
    ++hd.earliest_seq;
    header_dirty = true;
  }

  if (hd.next_seq > hd.earliest_seq && !log->read_record_locked(hd.next_seq - 1)) {
    log->recovery_.torn_record_discarded = true;
    log->recovery_.discarded_seq = hd.next_seq - 1;
    --hd.next_seq;
    header_dirty = true;
  }

  for (Seq s = hd.earliest_seq; s < hd.next_seq; ++s) {
    if (!log->read_record_locked(s)) {
      throw Error(Errc::corrupt_header, log->device_->describe() + ": record " +
                                            std::to_string(s) + " fails checksum");
    }
  }

  if (header_dirty) {
    log->write_header_locked();
    log->device_->sync();
  }
  log->load_dedup_locked();
  return log;
}

void Log::write_header_locked() { device_->write(0, encode_header(header_)); }

void Log::write_record_locked(Seq seq, std::span<const std::uint8_t> payload, const MessageId& id,
                              SimTime now) {
  Bytes rec(format::record_stride(header_.element_size), 0);
  std::span<std::uint8_t> s(rec);
  store_u64(s, 0, seq);
  std::copy(id.bytes.begin(), id.bytes.end(), rec.begin() + 8);
  store_u64(s, 24, static_cast<std::uint64_t>(now.count()));
  store_u32(s, 32, static_cast<std::uint32_t>(payload.size()));
  std::copy(payload.begin(), payload.end(), rec.begin() + format::kRecordHeaderSize);
  const auto body = std::span<const std::uint8_t>(rec).subspan(format::kRecordHeaderSize);
  store_u32(s, format::kRecordCrcOffset,
            crc(std::span<const std::uint8_t>(rec).first(format::kRecordCrcOffset), body));
  device_->write(format::record_offset(seq, header_.capacity, header_.element_size), rec);
}

std::optional<LogEntry> Log::read_record_locked(Seq seq) const {
  Bytes rec(format::record_stride(header_.element_size));
  const auto got =
      device_->read(format::record_offset(seq, header_.capacity, header_.element_size), rec);
  if (got != rec.size()) return std::nullopt;
  std::span<const std::uint8_t> s(rec);
  const auto body = s.subspan(format::kRecordHeaderSize);
  if (load_u32(s, format::kRecordCrcOffset) != crc(s.first(format::kRecordCrcOffset), body)) {
    return std::nullopt;
  }
  if (load_u64(s, 0) != seq) return std::nullopt;
  const auto len = load_u32(s, 32);
  if (len > header_.element_size) return std::nullopt;
  LogEntry e;
  e.seq = seq;
  std::copy_n(rec.begin() + 8, 16, e.message_id.bytes.begin());
  e.created_at = SimTime{static_cast<std::int64_t>(load_u64(s, 24))};
  e.payload.assign(body.begin(), body.begin() + len);
  return e;
}

void Log::journal_eviction_locked(Seq seq, const MessageId& id) {
  Bytes slot(format::kJournalSlotSize, 0);
  std::copy(id.bytes.begin(), id.bytes.end(), slot.begin());
  store_u64(slot, 16, seq);
  const auto off = format::journal_offset(header_.capacity, header_.element_size) +
                   ((seq - 1) % header_.dedup_capacity) * format::kJournalSlotSize;
  device_->write(off, slot);
}

void Log::load_dedup_locked() {
  std::vector<std::pair<Seq, MessageId>> known;
  const auto base = format::journal_offset(header_.capacity, header_.element_size);
  if (device_->size() > base) {
    Bytes journal(static_cast<std::size_t>(
        std::min<std::uint64_t>(device_->size() - base,
                                std::uint64_t{header_.dedup_capacity} * format::kJournalSlotSize)));
    const auto got = device_->read(base, journal);
    for (std::size_t off = 0; off + format::kJournalSlotSize <= got;
         off += format::kJournalSlotSize) {
      const Seq seq = load_u64(journal, off + 16);
      if (seq == 0 || seq >= header_.earliest_seq) continue;
      MessageId id;
      std::copy_n(journal.begin() + static_cast<std::ptrdiff_t>(off), 16, id.bytes.begin());
      known.emplace_back(seq, id);
    }
  }
  for (Seq s = header_.earliest_seq; s < header_.next_seq; ++s) {
    if (auto rec = read_record_locked(s)) known.emplace_back(s, rec->message_id);
  }
  std::sort(known.begin(), known.end());
  for (const auto& [seq, id] : known) dedup_.insert(id, seq);
}

AppendResult Log::append(std::span<const std::uint8_t> payload, const MessageId& id, SimTime now) {
  std::unique_lock lock(mu_);
  if (auto seq = dedup_.lookup(id)) return {*seq, true};
  if (payload.size() > header_.element_size) {
    throw Error(Errc::payload_too_large, "payload of " + std::to_string(payload.size()) +
                                             " bytes exceeds element size " +
                                             std::to_string(header_.element_size) + " of log '" +
                                             header_.name + "'");
  }
  const Seq seq = header_.next_seq;
  const bool evicts = seq - header_.earliest_seq >= header_.capacity;
  if (evicts) {
    const Seq victim = header_.earliest_seq;
    if (eviction_floor_ != 0 && victim >= eviction_floor_) {
      throw Error(Errc::log_full, "log '" + header_.name + "' would evict unprocessed seq " +
                                      std::to_string(victim));
    }
    if (auto old = read_record_locked(victim)) journal_eviction_locked(victim, old->message_id);
  }
  write_record_locked(seq, payload, id, now);
  header_.next_seq = seq + 1;
  if (evicts) ++header_.earliest_seq;
  write_header_locked();
  if (options_.sync_each_append) device_->sync();
  dedup_.insert(id, seq);
  return {seq, false};
}

LogEntry Log::read(Seq seq) const {
  std::shared_lock lock(mu_);
  if (seq == 0 || seq >= header_.next_seq) {
    throw Error(Errc::seq_not_yet_assigned, "log '" + header_.name + "' seq " +
                                                std::to_string(seq) + " (next is " +
                                                std::to_string(header_.next_seq) + ")");
  }
  if (seq < header_.earliest_seq) {
    throw Error(Errc::seq_evicted, "log '" + header_.name + "' seq " + std::to_string(seq) +
                                       " (earliest retained is " +
                                       std::to_string(header_.earliest_seq) + ")");
  }
  auto rec = read_record_locked(seq);
  if (!rec) {
    throw Error(Errc::storage_failure,
                "log '" + header_.name + "' record " + std::to_string(seq) + " unreadable");
  }
  return std::move(*rec);
}

ScanResult Log::scan(Seq from, Seq to) const {
  std::shared_lock lock(mu_);
  ScanResult out;
  out.earliest_retained = header_.earliest_seq;
  if (from == 0) from = 1;
  if (from > to) return out;
  to = std::min(to, header_.next_seq - 1);
  if (from < header_.earliest_seq) {
    out.truncated = true;
    from = header_.earliest_seq;
  }
  for (Seq s = from; s <= to; ++s) {
    auto rec = read_record_locked(s);
    if (!rec) {
      throw Error(Errc::storage_failure,
                  "log '" + header_.name + "' record " + std::to_string(s) + " unreadable");
    }
    out.entries.push_back(std::move(*rec));
  }
  return out;
}

std::optional<Seq> Log::find_message(const MessageId& id) const {
  std::unique_lock lock(mu_);
  return dedup_.lookup(id);
}

LogHeader Log::header() const {
  std::shared_lock lock(mu_);
  return header_;
}

std::uint32_t Log::element_size() const {
  std::shared_lock lock(mu_);
  return header_.element_size;
}

Seq Log::next_seq() const {
  std::shared_lock lock(mu_);
  return header_.next_seq;
}

Seq Log::earliest_seq() const {
  std::shared_lock lock(mu_);
  return header_.earliest_seq;
}

std::uint64_t Log::size() const {
  std::shared_lock lock(mu_);
  return header_.next_seq - header_.earliest_seq;
}

void Log::resize(std::uint32_t new_element_size) {
  std::unique_lock lock(mu_);
  if (new_element_size == 0) throw Error(Errc::invalid_size, "element_size must be >= 1");
  std::vector<LogEntry> retained;
  for (Seq s = header_.earliest_seq; s < header_.next_seq; ++s) {
    auto rec = read_record_locked(s);
    if (!rec) throw Error(Errc::storage_failure, "record " + std::to_string(s) + " unreadable");
    if (rec->payload.size() > new_element_size) {
      throw Error(Errc::invalid_size, "retained seq " + std::to_string(s) + " holds " +
                                          std::to_string(rec->payload.size()) +
                                          " bytes, larger than new element size");
    }
    retained.push_back(std::move(*rec));
  }
  const auto remembered = dedup_.entries();
  header_.element_size = new_element_size;
  device_->truncate(0);
  write_header_locked();
  for (const auto& e : retained) write_record_locked(e.seq, e.payload, e.message_id, e.created_at);
  for (const auto& [id, seq] : remembered) {
    if (seq < header_.earliest_seq) journal_eviction_locked(seq, id);
  }
  device_->sync();
}

void Log::set_eviction_floor(Seq floor) {
  std::unique_lock lock(mu_);
  eviction_floor_ = floor;
}

Seq Log::eviction_floor() const {
  std::shared_lock lock(mu_);
  return eviction_floor_;
}

}  // namespace fabric::logstore
