/*
 * include/fabric/transport/client.hpp
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

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <unordered_map>

#include "fabric/netsim/network.hpp"
#include "fabric/transport/server.hpp"
#include "fabric/transport/wire.hpp"

namespace fabric::transport {

using netsim::NodeId;

/// Per-attempt reply timeout min(base * 2^k, cap). Unbounded by default: a
/// message is retried until it is stored or the caller goes away.
struct RetryPolicy {
  Duration base = from_ms(100);
  Duration cap = from_seconds(5);
  std::optional<int> max_attempts;

  Duration timeout(int attempt) const;
};

struct ClientOptions {
  bool size_cache = false;
  RetryPolicy retry;
  /// First contact with a target pays one extra round trip of setup.
  bool connection_setup = true;
};

struct AppendOutcome {
  std::optional<Errc> error;
  std::string message;
  Seq seq = 0;
  MessageId message_id;
  int attempts = 0;     // request frames sent
  int round_trips = 0;  // request/reply exchanges completed
  bool cache_hit = false;
  SimTime started{0};
  SimTime finished{0};

  bool ok() const { return !error.has_value(); }
  Duration elapsed() const { return finished - started; }
};

struct ClientStats {
  std::uint64_t started = 0;
  std::uint64_t succeeded = 0;
  std::uint64_t failed = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t stale_replies = 0;
};

/// Remote append state machine over a netsim network: an optional
/// element-size exchange, then the append, each retried on timeout with the
/// same request id and message id.
class SimClient {
 public:
  using Send = std::function<void(const NodeId& to, Bytes frame)>;
  using Callback = std::function<void(const AppendOutcome&)>;

  SimClient(netsim::Network& net, NodeId self, ClientOptions options, Send send);
  ~SimClient();
  SimClient(const SimClient&) = delete;
  SimClient& operator=(const SimClient&) = delete;

  void remote_append(const NodeId& target, const std::string& log, const MessageId& id,
                     Bytes payload, Callback done);
  /// Drives the simulator until the append completes or `deadline` passes.
  AppendOutcome append_sync(const NodeId& target, const std::string& log, const MessageId& id,
                            Bytes payload, Duration deadline = from_seconds(24 * 3600));

  void on_reply(const NodeId& from, const Frame& frame);

  /// Drops every in-flight operation without calling back (process crash).
  void reset();

  void set_size_cache(bool on);
  void invalidate_cache(const NodeId& target, const std::string& log);
  std::optional<std::uint32_t> cached_size(const NodeId& target, const std::string& log) const;

  std::size_t in_flight() const { return ops_.size(); }
  const ClientStats& stats() const { return stats_; }
  const ClientOptions& options() const { return options_; }
  const NodeId& self() const { return self_; }
  netsim::Network& network() { return net_; }
  MessageId fresh_id() { return MessageId::random(rng_); }

 private:
  enum class Phase { size, append };
  struct Op {
    NodeId target;
    std::string log;
    MessageId id;
    Bytes payload;
    Callback done;
    Phase phase = Phase::size;
    std::uint32_t element_size = 0;
    int phase_attempt = 0;
    netsim::EventId timer = 0;
    AppendOutcome outcome;
  };
  struct CacheEntry {
    std::uint32_t element_size;
    SimTime cached_at;
  };

  void transmit(std::uint64_t rid);
  void on_timeout(std::uint64_t rid);
  void start_append_phase(std::uint64_t rid);
  void finish(std::uint64_t rid, std::optional<Errc> error, std::string message);

  netsim::Network& net_;
  NodeId self_;
  ClientOptions options_;
  Send send_;
  std::mt19937_64 rng_;
  std::unordered_map<std::uint64_t, Op> ops_;
  std::map<std::pair<NodeId, std::string>, CacheEntry> cache_;
  std::set<NodeId> connected_;
  ClientStats stats_;
  std::shared_ptr<bool> alive_;
};

/// Binds a node's receiver to an optional LogServer and a SimClient,
/// dispatching by frame type.
class SimEndpoint {
 public:
  SimEndpoint(netsim::Network& net, NodeId id, ClientOptions options = {});
  ~SimEndpoint();

  void set_server(LogServer* server) { server_ = server; }
  SimClient& client() { return client_; }
  const NodeId& id() const { return id_; }
  std::uint64_t undeliverable() const { return undeliverable_; }

 private:
  void receive(const NodeId& from, Bytes frame);

  netsim::Network& net_;
  NodeId id_;
  LogServer* server_ = nullptr;
  SimClient client_;
  std::uint64_t undeliverable_ = 0;
};

}  // namespace fabric::transport
