/*
 * src/dataflow/graph.cpp
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

#include "fabric/dataflow/graph.hpp"

#include <set>

#include "fabric/common/error.hpp"

namespace fabric::dataflow {

const NodeSpec* DataflowGraph::find(const std::string& id) const {
  for (const auto& n : nodes) {
    if (n.id == id) return &n;
  }
  return nullptr;
}

const ExternalInput* DataflowGraph::find_external(const std::string& name) const {
  for (const auto& e : externals) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

OpRegistry OpRegistry::with_builtins() {
  OpRegistry r;
  auto numeric = [](auto combine) {
    return [combine](const std::vector<Value>& in) {
      if (in.empty()) throw Error(Errc::type_mismatch, "op needs at least one input");
      if (in[0].kind() == Kind::int64) {
        std::int64_t acc = in[0].as_int();
        for (std::size_t i = 1; i < in.size(); ++i) acc = combine(acc, in[i].as_int());
        return Value::of(acc);
      }
      double acc = in[0].as_float();
      for (std::size_t i = 1; i < in.size(); ++i) acc = combine(acc, in[i].as_float());
      return Value::of(acc);
    };
  };
  r.add("add", numeric([](auto a, auto b) { return a + b; }));
  r.add("mul", numeric([](auto a, auto b) { return a * b; }));
  r.add("identity", [](const std::vector<Value>& in) {
    if (in.size() != 1) throw Error(Errc::type_mismatch, "identity takes one input");
    return in[0];
  });
  r.add("sum", [](const std::vector<Value>& in) {
    if (in.size() != 1) throw Error(Errc::type_mismatch, "sum takes one vector");
    double acc = 0;
    for (double x : in[0].as_fvec()) acc += x;
    return Value::of(acc);
  });
  return r;
}

void OpRegistry::add(const std::string& name, OpFn fn) { ops_[name] = std::move(fn); }

const OpFn* OpRegistry::find(const std::string& name) const {
  auto it = ops_.find(name);
  return it == ops_.end() ? nullptr : &it->second;
}

namespace {

const PortSpec* find_port(const NodeSpec& n, const std::string& port) {
  for (const auto& p : n.inputs) {
    if (p.name == port) return &p;
  }
  return nullptr;
}

}  // namespace

void validate(const DataflowGraph& g, const OpRegistry& ops) {
  if (g.name.empty() || g.name.find('/') != std::string::npos) {
    throw Error(Errc::invalid_argument, "graph name must be non-empty and contain no '/'");
  }
  if (g.window == 0) throw Error(Errc::invalid_argument, "graph window must be >= 1");
  std::set<std::string> ids;
  for (const auto& n : g.nodes) {
    if (n.id.empty() || n.id.find('/') != std::string::npos || !ids.insert(n.id).second) {
      throw Error(Errc::invalid_argument, "bad or duplicate node id '" + n.id + "'");
    }
    if (n.inputs.empty()) throw Error(Errc::invalid_argument, "node '" + n.id + "' has no inputs");
    std::set<std::string> ports;
    for (const auto& p : n.inputs) {
      if (p.name.empty() || !ports.insert(p.name).second) {
        throw Error(Errc::invalid_argument, "bad or duplicate port on '" + n.id + "'");
      }
    }
    if (!n.embedded && ops.find(n.op) == nullptr) {
      throw Error(Errc::unknown_handler, "node '" + n.id + "' uses unknown op '" + n.op + "'");
    }
  }

  std::map<std::pair<std::string, std::string>, int> wired;
  for (const auto& e : g.edges) {
    const auto* from = g.find(e.from);
    const auto* to = g.find(e.to);
    if (from == nullptr || to == nullptr) {
      throw Error(Errc::invalid_argument, "edge " + e.from + " -> " + e.to + " names a missing node");
    }
    const auto* port = find_port(*to, e.port);
    if (port == nullptr) throw Error(Errc::invalid_argument, "no port " + e.to + "." + e.port);
    if (!(from->output == port->type)) {
      throw Error(Errc::type_mismatch, e.from + " produces " + from->output.str() + " but " + e.to +
                                           "." + e.port + " takes " + port->type.str());
    }
    ++wired[{e.to, e.port}];
  }
  std::set<std::string> names;
  for (const auto& x : g.externals) {
    if (x.name.empty() || !names.insert(x.name).second) {
      throw Error(Errc::invalid_argument, "bad or duplicate external input '" + x.name + "'");
    }
    const auto* to = g.find(x.to);
    if (to == nullptr || find_port(*to, x.port) == nullptr) {
      throw Error(Errc::invalid_argument, "external '" + x.name + "' feeds a missing port");
    }
    ++wired[{x.to, x.port}];
  }
  for (const auto& n : g.nodes) {
    for (const auto& p : n.inputs) {
      const int count = wired[{n.id, p.name}];
      if (count != 1) {
        throw Error(Errc::invalid_argument, n.id + "." + p.name + " is wired " +
                                                std::to_string(count) + " times, expected once");
      }
    }
  }
  topological_order(g);
}

std::vector<std::string> topological_order(const DataflowGraph& g) {
  std::map<std::string, int> indegree;
  for (const auto& n : g.nodes) indegree[n.id] = 0;
  for (const auto& e : g.edges) {
    if (e.from == e.to) throw Error(Errc::cycle_detected, "self-loop on '" + e.from + "'");
    ++indegree[e.to];
  }
  std::vector<std::string> order;
  std::vector<std::string> ready;
  for (const auto& n : g.nodes) {
    if (indegree[n.id] == 0) ready.push_back(n.id);
  }
  while (!ready.empty()) {
    const auto id = ready.front();
    ready.erase(ready.begin());
    order.push_back(id);
    for (const auto& e : g.edges) {
      if (e.from == id && --indegree[e.to] == 0) ready.push_back(e.to);
    }
  }
  if (order.size() != g.nodes.size()) {
    throw Error(Errc::cycle_detected, "graph '" + g.name + "' has a cycle");
  }
  return order;
}

}  // namespace fabric::dataflow
