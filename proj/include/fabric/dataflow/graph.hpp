/*
 * include/fabric/dataflow/graph.hpp
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
#include <string>
#include <vector>

#include "fabric/dataflow/value.hpp"
#include "fabric/netsim/throughput.hpp"

namespace fabric::dataflow {

using netsim::NodeId;

struct PortSpec {
  std::string name;
  Type type;
};

struct NodeSpec {
  std::string id;
  std::vector<PortSpec> inputs;
  Type output;
  /// Built-in op name, or the task kind when `embedded`.
  std::string op;
  /// Embedded nodes hand their inputs to an external executor (the pilot)
  /// and take its result as their output.
  bool embedded = false;
};

/// Producer output -> consumer input, within one iteration.
struct Edge {
  std::string from;
  std::string to;
  std::string port;
};

/// A named entry point fed by inject(); appended from `source`.
struct ExternalInput {
  std::string name;
  std::string to;
  std::string port;
  NodeId source;
};

struct DataflowGraph {
  std::string name;
  std::vector<NodeSpec> nodes;
  std::vector<Edge> edges;
  std::vector<ExternalInput> externals;
  std::map<std::string, NodeId> placement;
  /// Iterations of history each operand log holds.
  std::uint64_t window = 256;

  const NodeSpec* find(const std::string& id) const;
  const ExternalInput* find_external(const std::string& name) const;
};

using OpFn = std::function<Value(const std::vector<Value>& inputs)>;

class OpRegistry {
 public:
  /// Registers add, mul, identity and sum.
  static OpRegistry with_builtins();
  void add(const std::string& name, OpFn fn);
  const OpFn* find(const std::string& name) const;

 private:
  std::map<std::string, OpFn> ops_;
};

/// Structural checks: unique ids, every input wired exactly once, edge
/// types match, ops known, no cycles. Placement is checked at deploy time.
void validate(const DataflowGraph& graph, const OpRegistry& ops);

/// Node ids in an order where producers precede consumers.
std::vector<std::string> topological_order(const DataflowGraph& graph);

}  // namespace fabric::dataflow
