/*
 * src/events/forwarder.cpp
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

#include "fabric/events/forwarder.hpp"

#include <algorithm>

namespace fabric::events {

namespace {

bool transient(Errc e) {
  switch (e) {
    case Errc::payload_too_large:
    case Errc::decode_error:
      return false;
    default:
      return true;
  }
}

}  // namespace

Bytes OutboxRecord::encode() const {
  ByteWriter w;
  w.str16(target).str16(log).id(id).blob32(payload);
  return w.take();
}

OutboxRecord OutboxRecord::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  OutboxRecord rec;
  rec.target = r.str16();
  rec.log = r.str16();
  rec.id = r.id();
  rec.payload = r.blob32();
  return rec;
}

std::size_t OutboxRecord::encoded_size(const NodeId& target, const std::string& log,
                                       std::size_t payload_size) {
  return 2 + target.size() + 2 + log.size() + 16 + 4 + payload_size;
}

Forwarder::Forwarder(NodeId node, logstore::LogStore& store, transport::SimClient& client,
                     ForwarderOptions options)
    : node_(std::move(node)),
      store_(store),
      client_(client),
      options_(options),
      alive_(std::make_shared<bool>(true)) {}

Forwarder::~Forwarder() { *alive_ = false; }

std::string Forwarder::cursor_log_name() {
  return HandlerEngine::cursor_log_name("__forwarder", kOutboxLog);
}

void Forwarder::start() {
  auto& clog = store_.ensure_log(cursor_log_name(), 8, 16, logstore::LogOptions{64, false});
  cursor_ = clog.next_seq() > 1 ? load_u64(clog.read(clog.next_seq() - 1).payload, 0) : 0;
  next_ = cursor_ + 1;
  in_flight_.clear();
  done_.clear();
  attempts_.clear();
  running_ = true;
  if (auto* outbox = store_.find(kOutboxLog)) outbox->set_eviction_floor(cursor_ + 1);
  pump();
}

void Forwarder::halt() {
  running_ = false;
  *alive_ = false;
  alive_ = std::make_shared<bool>(true);
  in_flight_.clear();
}

void Forwarder::poke() {
  if (running_) pump();
}

std::uint64_t Forwarder::backlog() const {
  const auto* outbox = store_.find(kOutboxLog);
  return outbox ? outbox->next_seq() - 1 - cursor_ : 0;
}

void Forwarder::pump() {
  const auto* outbox = store_.find(kOutboxLog);
  if (outbox == nullptr) return;
  const Seq tail = outbox->next_seq() - 1;
  while (running_ && in_flight_.size() < options_.window && next_ <= tail) send(next_++);
}

void Forwarder::send(Seq seq) {
  OutboxRecord rec;
  try {
    rec = OutboxRecord::decode(store_.get(kOutboxLog).read(seq).payload);
  } catch (const Error& e) {
    dead_.push_back("outbox seq " + std::to_string(seq) + ": " + e.what());
    ++stats_.dead_letters;
    settle(seq);
    return;
  }
  in_flight_.insert(seq);
  ++stats_.sent;
  std::weak_ptr<bool> alive = alive_;
  client_.remote_append(rec.target, rec.log, rec.id, std::move(rec.payload),
                        [this, alive, seq](const transport::AppendOutcome& out) {
                          if (auto a = alive.lock(); a && *a) on_outcome(seq, out);
                        });
}

void Forwarder::on_outcome(Seq seq, const transport::AppendOutcome& out) {
  if (!in_flight_.count(seq)) return;
  if (out.ok()) {
    ++stats_.delivered;
    in_flight_.erase(seq);
    settle(seq);
    return;
  }
  if (!transient(*out.error)) {
    dead_.push_back("outbox seq " + std::to_string(seq) + ": " + out.message);
    ++stats_.dead_letters;
    in_flight_.erase(seq);
    settle(seq);
    return;
  }
  ++stats_.retries;
  const int k = attempts_[seq]++;
  Duration delay = options_.retry_delay;
  for (int i = 0; i < k && delay < options_.max_retry_delay; ++i) delay *= 2;
  delay = std::min(delay, options_.max_retry_delay);
  std::weak_ptr<bool> alive = alive_;
  client_.network().simulator().schedule_after(
      delay, "forward-retry",
      [this, alive, seq] {
        if (auto a = alive.lock(); a && *a && running_) {
          in_flight_.erase(seq);
          send(seq);
        }
      },
      node_);
}

void Forwarder::settle(Seq seq) {
  done_.insert(seq);
  attempts_.erase(seq);
  // One cursor record per settled seq keeps the cursor log independent of
  // how completions happened to batch up.
  while (done_.count(cursor_ + 1)) {
    done_.erase(++cursor_);
    Bytes payload(8);
    store_u64(payload, 0, cursor_);
    store_.get(cursor_log_name())
        .append(payload, MessageIdBuilder().add("forwarder-cursor").add(cursor_).finish());
    store_.get(kOutboxLog).set_eviction_floor(cursor_ + 1);
  }
  pump();
}

}  // namespace fabric::events
