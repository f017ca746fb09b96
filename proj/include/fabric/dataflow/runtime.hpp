/*
 * include/fabric/dataflow/runtime.hpp
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

#include <map>
#include <memory>
#include <optional>

#include "fabric/dataflow/graph.hpp"
#include "fabric/events/node.hpp"

namespace fabric::dataflow {

using logstore::Seq;

/// One operand as stored in a port log.
struct Operand {
  std::uint64_t iteration = 0;
  Value value;

  Bytes encode() const;
  static Operand decode(std::span<const std::uint8_t> bytes);
};

/// Inputs handed to an embedded node's executor.
struct TaskRequest {
  std::string graph;
  std::string node;
  std::string kind;
  std::uint64_t iteration = 0;
  std::vector<Value> inputs;

  Bytes encode() const;
  static TaskRequest decode(std::span<const std::uint8_t> bytes);
};

/// A firing as observed by the runtime (a monitor, not log state).
struct Firing {
  std::string node;
  std::uint64_t iteration = 0;
  std::size_t operands = 0;
  SimTime at{0};
};

/// A graph whose operand logs and firing handlers are installed on fabric
/// nodes. Each node gets one log per input port and one output log on its
/// placement; a firing handler on every input log checks the other ports
/// for the same iteration and fires once all are present.
class DeployedGraph {
 public:
  using Nodes = std::map<NodeId, events::FabricNode*>;
  using OutputListener = std::function<void(const std::string& node, std::uint64_t iteration,
                                            const Value& value)>;
  using TaskListener = std::function<void(const TaskRequest& request)>;

  /// Validates, creates logs (or adopts existing ones) and binds handlers.
  static std::unique_ptr<DeployedGraph> deploy(DataflowGraph graph, Nodes nodes,
                                               OpRegistry ops = OpRegistry::with_builtins());

  /// Feeds an external input. False if the source node is down.
  bool inject(const std::string& external, std::uint64_t iteration, const Value& value);
  /// Feeds an external input as an effect of a running handler, whose node
  /// must be the input's source. Replays yield the same operand id.
  void inject_from(events::HandlerContext& ctx, const std::string& external, std::uint64_t iteration,
                   const Value& value);
  /// Stores an embedded node's result. False if its node is down.
  bool complete_task(const std::string& node, std::uint64_t iteration, const Value& result);

  /// Fires every node whose inputs for some iteration are complete but
  /// whose output (or task request) is missing.
  void resume();

  std::optional<Value> output(const std::string& node, std::uint64_t iteration) const;
  std::vector<Operand> outputs(const std::string& node) const;
  std::optional<TaskRequest> task(const std::string& node, std::uint64_t iteration) const;

  void on_output(OutputListener fn) { output_listeners_.push_back(std::move(fn)); }
  void on_task(TaskListener fn) { task_listeners_.push_back(std::move(fn)); }

  const std::vector<Firing>& firings() const { return firings_; }
  const DataflowGraph& graph() const { return graph_; }

  static std::string input_log(const std::string& g, const std::string& node, const std::string& port);
  static std::string output_log(const std::string& g, const std::string& node);
  static std::string task_log(const std::string& g, const std::string& node);
  static MessageId output_id(const std::string& g, const std::string& node, std::uint64_t iteration);
  static MessageId operand_id(const std::string& g, const std::string& node, const std::string& port,
                              std::uint64_t iteration, const Value& value);

 private:
  DeployedGraph(DataflowGraph graph, Nodes nodes, OpRegistry ops);
  void install();
  events::FabricNode& placed(const std::string& node) const;
  void fire(const NodeSpec& spec, const std::string& port, const logstore::LogEntry& entry,
            events::HandlerContext& ctx);
  void emit(const NodeSpec& spec, const logstore::LogEntry& entry, events::HandlerContext& ctx);
  Value compute(const NodeSpec& spec, const std::vector<Value>& inputs) const;
  /// Latest operand for `iteration` in a port log, searching the window.
  std::optional<std::pair<Seq, Value>> find_operand(const logstore::Log& log, std::uint64_t iteration,
                                                    Seq upto) const;
  bool append_to(const std::string& node, const std::string& log, const Bytes& payload,
                 const MessageId& id);

  DataflowGraph graph_;
  Nodes nodes_;
  OpRegistry ops_;
  std::vector<Firing> firings_;
  std::vector<OutputListener> output_listeners_;
  std::vector<TaskListener> task_listeners_;
};

}  // namespace fabric::dataflow
