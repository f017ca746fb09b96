/*
 * include/fabric/events/engine.hpp
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

#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fabric/common/time.hpp"
#include "fabric/logstore/log_store.hpp"
#include "fabric/netsim/throughput.hpp"

namespace fabric::events {

using logstore::LogEntry;
using logstore::Seq;
using netsim::NodeId;

/// Thrown by a crash probe to abort the node at a firing boundary.
struct SimulatedCrash : std::runtime_error {
  SimulatedCrash() : std::runtime_error("simulated crash") {}
};

enum class Boundary { before_fire, after_effect, after_effects };
std::string to_string(Boundary b);

struct CrashPoint {
  NodeId node;
  std::string handler_id;
  std::string log;
  Seq seq = 0;
  Boundary stage = Boundary::before_fire;
  std::size_t effect = 0;  // for after_effect
};

/// Called at every boundary; throws SimulatedCrash to crash the node there.
using CrashProbe = std::function<void(const CrashPoint&)>;

/// One follow-on append. An empty target means the local node.
struct AppendEffect {
  NodeId target;
  std::string log;
  Bytes payload;
  std::optional<MessageId> id;
};

/// What a handler sees: read access to the node's logs and an effect list.
/// Effects are applied after the handler returns, with ids derived from
/// (handler, log, seq, index) unless the handler supplies one.
class HandlerContext {
 public:
  HandlerContext(const NodeId& node, const std::string& handler_id, const std::string& log,
                 Seq seq, const logstore::LogStore& store);

  const NodeId& node() const { return node_; }
  const std::string& handler_id() const { return handler_id_; }
  const std::string& log_name() const { return log_; }
  Seq seq() const { return seq_; }

  const logstore::Log* find_log(const std::string& name) const { return store_.find(name); }
  const logstore::Log& log(const std::string& name) const { return store_.get(name); }
  /// The last `n` retained entries of `name` up to and including `upto`.
  std::vector<LogEntry> tail(const std::string& name, Seq upto, std::size_t n) const;

  void append(const std::string& log, Bytes payload, std::optional<MessageId> id = std::nullopt);
  void remote_append(const NodeId& target, const std::string& log, Bytes payload,
                     std::optional<MessageId> id = std::nullopt);

  const std::vector<AppendEffect>& effects() const { return effects_; }
  std::vector<AppendEffect> take_effects() { return std::move(effects_); }

 private:
  const NodeId& node_;
  const std::string& handler_id_;
  const std::string& log_;
  Seq seq_;
  const logstore::LogStore& store_;
  std::vector<AppendEffect> effects_;
};

using HandlerFn = std::function<void(const LogEntry&, HandlerContext&)>;

class HandlerTable {
 public:
  void add(const std::string& id, HandlerFn fn);
  const HandlerFn* find(const std::string& id) const;
  bool contains(const std::string& id) const { return find(id) != nullptr; }

 private:
  std::map<std::string, HandlerFn> fns_;
};

struct InvocationRecord {
  std::string handler_id;
  std::string log;
  Seq seq = 0;
  bool ok = true;
  std::string error;
  std::size_t effects = 0;
};

struct EngineStats {
  std::uint64_t invocations = 0;
  std::uint64_t failures = 0;
  std::uint64_t local_effects = 0;
  std::uint64_t remote_effects = 0;
  std::uint64_t duplicate_effects = 0;
};

inline constexpr const char* kSysPrefix = "__sys/";

/// Runs handlers bound to logs, one invocation per appended entry, in seq
/// order per binding. Invocations never wait for one another: appends made
/// while a handler runs are queued and drained afterwards.
class HandlerEngine {
 public:
  struct Hooks {
    std::function<SimTime()> now;
    /// Stores a remote effect for forwarding.
    std::function<void(const AppendEffect&, const MessageId&)> remote;
    /// Told about every local append the engine makes.
    std::function<void(const std::string& log, Seq seq)> appended;
  };

  HandlerEngine(NodeId node, logstore::LogStore& store, const HandlerTable& table, Hooks hooks);

  /// Binds a registered handler. A binding with no persisted cursor starts
  /// after the log's current tail.
  void bind(const std::string& log, const std::string& handler_id);
  /// Queues invocations for `seq` and drains the queue unless already draining.
  void on_append(const std::string& log, Seq seq);
  /// Re-fires every entry past each binding's persisted cursor.
  void resume();
  /// Drops queued work; nothing fires until resume().
  void halt();

  Seq cursor(const std::string& handler_id, const std::string& log) const;
  void set_crash_probe(CrashProbe probe) { probe_ = std::move(probe); }
  const std::vector<InvocationRecord>& history() const { return history_; }
  const EngineStats& stats() const { return stats_; }
  std::size_t queued() const { return queue_.size(); }

  static std::string cursor_log_name(const std::string& handler_id, const std::string& log);
  static MessageId effect_id(const std::string& handler_id, const std::string& log, Seq seq,
                             std::size_t index);

 private:
  struct BindingState {
    std::string handler_id;
    std::string log;
    Seq cursor = 0;
  };

  void drain();
  void fire(std::size_t binding, Seq seq);
  void apply(BindingState& b, Seq seq, std::size_t index, const AppendEffect& effect);
  void commit(BindingState& b, Seq seq);
  void update_floor(const std::string& log);
  void probe(const BindingState& b, Seq seq, Boundary stage, std::size_t effect = 0);

  NodeId node_;
  logstore::LogStore& store_;
  const HandlerTable& table_;
  Hooks hooks_;
  CrashProbe probe_;
  std::vector<BindingState> bindings_;
  std::deque<std::pair<std::size_t, Seq>> queue_;
  bool draining_ = false;
  bool halted_ = false;
  std::vector<InvocationRecord> history_;
  EngineStats stats_;
};

}  // namespace fabric::events
