/*
 * include/fabric/events/forwarder.hpp
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

#include <memory>
#include <set>

#include "fabric/events/engine.hpp"
#include "fabric/transport/client.hpp"

namespace fabric::events {

inline const std::string kOutboxLog = "__sys/outbox";

/// A remote append parked in the local outbox until the target takes it.
struct OutboxRecord {
  NodeId target;
  std::string log;
  MessageId id;
  Bytes payload;

  Bytes encode() const;
  static OutboxRecord decode(std::span<const std::uint8_t> bytes);
  /// Encoded size for a payload of `payload_size` bytes.
  static std::size_t encoded_size(const NodeId& target, const std::string& log,
                                  std::size_t payload_size);
};

struct ForwarderOptions {
  /// Outbox entries in flight at once. With 1, entries reach each target
  /// in outbox order even across retries and restarts.
  std::size_t window = 1;
  Duration retry_delay = from_seconds(1);
  Duration max_retry_delay = from_seconds(60);
};

struct ForwarderStats {
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  std::uint64_t retries = 0;
  std::uint64_t dead_letters = 0;
};

/// Store-and-forward pump: drains the outbox in seq order through the
/// remote-append client, keeping a persisted cursor over the prefix that
/// is known delivered. Transient failures (target down, unknown log, full
/// log) are retried with backoff; the stored message id makes resends
/// after a restart idempotent at the target.
class Forwarder {
 public:
  Forwarder(NodeId node, logstore::LogStore& store, transport::SimClient& client,
            ForwarderOptions options = {});
  ~Forwarder();

  /// Loads the persisted cursor and starts sending.
  void start();
  /// Called after each new outbox entry.
  void poke();
  void halt();

  Seq cursor() const { return cursor_; }
  std::size_t in_flight() const { return in_flight_.size(); }
  std::uint64_t backlog() const;
  const ForwarderStats& stats() const { return stats_; }
  const std::vector<std::string>& dead_letters() const { return dead_; }

  static std::string cursor_log_name();

 private:
  void pump();
  void send(Seq seq);
  void on_outcome(Seq seq, const transport::AppendOutcome& out);
  void settle(Seq seq);

  NodeId node_;
  logstore::LogStore& store_;
  transport::SimClient& client_;
  ForwarderOptions options_;
  Seq cursor_ = 0;
  Seq next_ = 1;
  std::set<Seq> in_flight_;
  std::set<Seq> done_;
  std::map<Seq, int> attempts_;
  bool running_ = false;
  ForwarderStats stats_;
  std::vector<std::string> dead_;
  std::shared_ptr<bool> alive_;
};

}  // namespace fabric::events
