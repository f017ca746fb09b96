/*
 * include/fabric/events/node.hpp
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

#include "fabric/events/engine.hpp"
#include "fabric/events/forwarder.hpp"
#include "fabric/transport/client.hpp"
#include "fabric/transport/server.hpp"

namespace fabric::events {

struct NodeConfig {
  NodeId id;
  transport::ClientOptions client;
  logstore::LogOptions log_options;
  std::uint32_t outbox_element_size = 4096;
  std::uint64_t outbox_capacity = 1024;
  ForwarderOptions forwarder;
};

/// A fabric process on one simulated host: its log store, the append
/// server, the remote-append client, the handler engine and the outbox
/// forwarder. The storage backend outlives crashes; everything else is
/// rebuilt from it on restart.
class FabricNode {
 public:
  using Observer = std::function<void(const std::string& log, Seq seq)>;

  FabricNode(netsim::Network& net, std::shared_ptr<logstore::StorageBackend> backend,
             NodeConfig config);
  ~FabricNode();
  FabricNode(const FabricNode&) = delete;
  FabricNode& operator=(const FabricNode&) = delete;

  const NodeId& id() const { return config_.id; }
  bool up() const { return up_; }

  /// Handler code; survives restarts.
  HandlerTable& handlers() { return handlers_; }
  /// Binds now and again after every restart.
  void bind(const std::string& log, const std::string& handler_id);
  /// Notified of every local append while the node is up; survives restarts.
  void add_observer(Observer fn) { observers_.push_back(std::move(fn)); }
  /// Survives restarts.
  void set_crash_probe(CrashProbe probe);

  logstore::Log& create_log(const std::string& name, std::uint32_t element_size,
                            std::uint64_t capacity);
  logstore::Log& ensure_log(const std::string& name, std::uint32_t element_size,
                            std::uint64_t capacity);

  /// Local append that fires bound handlers. Nothing when the node is down.
  std::optional<logstore::AppendResult> append(const std::string& log,
                                               std::span<const std::uint8_t> payload,
                                               const MessageId& id);
  /// Parks a remote append in the outbox. False when the node is down.
  bool remote_append(const NodeId& target, const std::string& log, Bytes payload,
                     const MessageId& id);

  /// Loses all volatile state; the node stops answering.
  void crash();
  /// Recovers logs from the backend, rebinds handlers and resumes
  /// unprocessed entries and the outbox.
  void restart();
  std::uint64_t crashes() const { return crashes_; }

  logstore::LogStore& store() { return *store_; }
  const logstore::LogStore& store() const { return *store_; }
  HandlerEngine& engine() { return *engine_; }
  Forwarder& forwarder() { return *forwarder_; }
  transport::LogServer& server() { return *server_; }
  transport::SimClient& client() { return endpoint_.client(); }
  netsim::Network& network() { return net_; }
  SimTime now() const { return net_.simulator().now(); }

 private:
  void build();
  void notify(const std::string& log, Seq seq, bool engine);
  void park(const AppendEffect& effect, const MessageId& id);
  void run_guarded(const std::function<void()>& fn);

  netsim::Network& net_;
  std::shared_ptr<logstore::StorageBackend> backend_;
  NodeConfig config_;
  transport::SimEndpoint endpoint_;
  HandlerTable handlers_;
  std::vector<std::pair<std::string, std::string>> bindings_;
  std::vector<Observer> observers_;
  CrashProbe probe_;
  std::unique_ptr<logstore::LogStore> store_;
  std::unique_ptr<transport::LogServer> server_;
  std::unique_ptr<HandlerEngine> engine_;
  std::unique_ptr<Forwarder> forwarder_;
  bool up_ = false;
  std::uint64_t crashes_ = 0;
};

}  // namespace fabric::events
