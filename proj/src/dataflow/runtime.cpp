/*
 * src/dataflow/runtime.cpp
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

#include "fabric/dataflow/runtime.hpp"

#include <algorithm>

#include "fabric/common/error.hpp"

namespace fabric::dataflow {

using events::FabricNode;
using events::HandlerContext;
using logstore::LogEntry;

Bytes Operand::encode() const {
  ByteWriter w;
  w.u64(iteration).raw(value.encode());
  return w.take();
}

Operand Operand::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 9) throw Error(Errc::corrupt_graph_state, "operand record too short");
  try {
    return Operand{load_u64(bytes, 0), Value::decode(bytes.subspan(8))};
  } catch (const Error& e) {
    throw Error(Errc::corrupt_graph_state, std::string("bad operand: ") + e.what());
  }
}

Bytes TaskRequest::encode() const {
  ByteWriter w;
  w.str16(graph).str16(node).str16(kind).u64(iteration).u32(static_cast<std::uint32_t>(inputs.size()));
  for (const auto& v : inputs) w.blob32(v.encode());
  return w.take();
}

TaskRequest TaskRequest::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  TaskRequest t;
  t.graph = r.str16();
  t.node = r.str16();
  t.kind = r.str16();
  t.iteration = r.u64();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) t.inputs.push_back(Value::decode(r.blob32()));
  return t;
}

std::string DeployedGraph::input_log(const std::string& g, const std::string& node,
                                     const std::string& port) {
  return "df/" + g + "/" + node + "/in/" + port;
}

std::string DeployedGraph::output_log(const std::string& g, const std::string& node) {
  return "df/" + g + "/" + node + "/out";
}

std::string DeployedGraph::task_log(const std::string& g, const std::string& node) {
  return "df/" + g + "/" + node + "/tasks";
}

MessageId DeployedGraph::output_id(const std::string& g, const std::string& node,
                                   std::uint64_t iteration) {
  return MessageIdBuilder().add("df").add(g).add(node).add("out").add(iteration).finish();
}

MessageId DeployedGraph::operand_id(const std::string& g, const std::string& node,
                                    const std::string& port, std::uint64_t iteration,
                                    const Value& value) {
  // The value digest makes a conflicting re-assignment a distinct message,
  // so it reaches the port log and is caught instead of deduped away.
  return MessageIdBuilder()
      .add("df")
      .add(g)
      .add(node)
      .add(port)
      .add(iteration)
      .add(value.digest().bytes)
      .finish();
}

DeployedGraph::DeployedGraph(DataflowGraph graph, Nodes nodes, OpRegistry ops)
    : graph_(std::move(graph)), nodes_(std::move(nodes)), ops_(std::move(ops)) {}

std::unique_ptr<DeployedGraph> DeployedGraph::deploy(DataflowGraph graph, Nodes nodes,
                                                     OpRegistry ops) {
  validate(graph, ops);
  for (const auto& n : graph.nodes) {
    auto it = graph.placement.find(n.id);
    if (it == graph.placement.end() || !nodes.count(it->second) || nodes.at(it->second) == nullptr) {
      throw Error(Errc::unknown_placement, "node '" + n.id + "' has no placement on a known host");
    }
  }
  for (const auto& x : graph.externals) {
    if (!nodes.count(x.source)) {
      throw Error(Errc::unknown_placement, "external '" + x.name + "' has unknown source '" + x.source + "'");
    }
  }
  std::unique_ptr<DeployedGraph> d(new DeployedGraph(std::move(graph), std::move(nodes), std::move(ops)));
  d->install();
  return d;
}

FabricNode& DeployedGraph::placed(const std::string& node) const {
  return *nodes_.at(graph_.placement.at(node));
}

void DeployedGraph::install() {
  const auto& g = graph_.name;
  auto check_outbox = [&](FabricNode& from, const NodeId& to, const std::string& log,
                          std::size_t payload) {
    const auto need = events::OutboxRecord::encoded_size(to, log, payload);
    if (need > from.store().get(events::kOutboxLog).element_size()) {
      throw Error(Errc::config_error, "outbox on " + from.id() + " too small for " + log);
    }
  };

  for (const auto& spec : graph_.nodes) {
    auto& host = placed(spec.id);
    for (const auto& p : spec.inputs) {
      host.ensure_log(input_log(g, spec.id, p.name),
                      static_cast<std::uint32_t>(8 + p.type.max_encoded_size()), graph_.window);
    }
    host.ensure_log(output_log(g, spec.id),
                    static_cast<std::uint32_t>(8 + spec.output.max_encoded_size()), graph_.window);
    if (spec.embedded) {
      std::size_t size = 2 + g.size() + 2 + spec.id.size() + 2 + spec.op.size() + 8 + 4;
      for (const auto& p : spec.inputs) size += 4 + p.type.max_encoded_size();
      host.ensure_log(task_log(g, spec.id), static_cast<std::uint32_t>(size), graph_.window);
    }
  }
  for (const auto& e : graph_.edges) {
    const auto& from = placed(e.from);
    if (from.id() != placed(e.to).id()) {
      check_outbox(placed(e.from), placed(e.to).id(), input_log(g, e.to, e.port),
                   8 + graph_.find(e.from)->output.max_encoded_size());
    }
  }
  for (const auto& x : graph_.externals) {
    if (x.source != placed(x.to).id()) {
      const auto* spec = graph_.find(x.to);
      for (const auto& p : spec->inputs) {
        if (p.name == x.port) {
          check_outbox(*nodes_.at(x.source), placed(x.to).id(), input_log(g, x.to, x.port),
                       8 + p.type.max_encoded_size());
        }
      }
    }
  }

  for (const auto& spec : graph_.nodes) {
    auto& host = placed(spec.id);
    const std::string prefix = "df/" + g + "/" + spec.id;
    for (const auto& p : spec.inputs) {
      const auto handler = prefix + "/fire/" + p.name;
      const std::string node_id = spec.id;
      const std::string port = p.name;
      host.handlers().add(handler, [this, node_id, port](const LogEntry& e, HandlerContext& ctx) {
        fire(*graph_.find(node_id), port, e, ctx);
      });
      host.bind(input_log(g, spec.id, p.name), handler);
    }
    const std::string node_id = spec.id;
    host.handlers().add(prefix + "/emit", [this, node_id](const LogEntry& e, HandlerContext& ctx) {
      emit(*graph_.find(node_id), e, ctx);
    });
    host.bind(output_log(g, spec.id), prefix + "/emit");

    const auto out_log = output_log(g, spec.id);
    const auto tlog = task_log(g, spec.id);
    FabricNode* hp = &host;
    host.add_observer([this, hp, node_id, out_log, tlog](const std::string& log, Seq seq) {
      if (log == out_log && !output_listeners_.empty()) {
        const auto op = Operand::decode(hp->store().get(log).read(seq).payload);
        for (const auto& fn : output_listeners_) fn(node_id, op.iteration, op.value);
      } else if (log == tlog && !task_listeners_.empty()) {
        const auto req = TaskRequest::decode(hp->store().get(log).read(seq).payload);
        for (const auto& fn : task_listeners_) fn(req);
      }
    });
  }
}

std::optional<std::pair<Seq, Value>> DeployedGraph::find_operand(const logstore::Log& log,
                                                                 std::uint64_t iteration,
                                                                 Seq upto) const {
  if (upto == 0) return std::nullopt;
  const Seq from = std::max<Seq>(log.earliest_seq(), upto >= graph_.window ? upto - graph_.window + 1 : 1);
  if (from > upto) return std::nullopt;
  // Earliest wins: a slot is assigned by the first operand that reached it.
  for (const auto& e : log.scan(from, upto).entries) {
    auto op = Operand::decode(e.payload);
    if (op.iteration == iteration) return std::make_pair(e.seq, std::move(op.value));
  }
  return std::nullopt;
}

Value DeployedGraph::compute(const NodeSpec& spec, const std::vector<Value>& inputs) const {
  auto out = (*ops_.find(spec.op))(inputs);
  if (!out.fits(spec.output)) {
    throw Error(Errc::type_mismatch, spec.id + " produced a value outside " + spec.output.str());
  }
  return out;
}

void DeployedGraph::fire(const NodeSpec& spec, const std::string& port, const LogEntry& entry,
                         HandlerContext& ctx) {
  const auto& g = graph_.name;
  const auto op = Operand::decode(entry.payload);
  const auto& own = ctx.log(input_log(g, spec.id, port));
  if (auto earlier = find_operand(own, op.iteration, entry.seq - 1)) {
    if (earlier->second == op.value) return;
    throw Error(Errc::double_assignment_conflict,
                spec.id + "." + port + " iteration " + std::to_string(op.iteration) +
                    " already holds " + earlier->second.str());
  }
  std::vector<Value> inputs;
  for (const auto& p : spec.inputs) {
    if (p.name == port) {
      inputs.push_back(op.value);
      continue;
    }
    const auto& log = ctx.log(input_log(g, spec.id, p.name));
    auto other = find_operand(log, op.iteration, log.next_seq() - 1);
    if (!other) return;  // strict: wait for every input
    inputs.push_back(std::move(other->second));
  }
  firings_.push_back(Firing{spec.id, op.iteration, inputs.size(), entry.created_at});
  if (spec.embedded) {
    TaskRequest req{g, spec.id, spec.op, op.iteration, std::move(inputs)};
    ctx.append(task_log(g, spec.id), req.encode(),
               MessageIdBuilder().add("df").add(g).add(spec.id).add("task").add(op.iteration).finish());
    return;
  }
  const Operand out{op.iteration, compute(spec, inputs)};
  ctx.append(output_log(g, spec.id), out.encode(), output_id(g, spec.id, op.iteration));
}

void DeployedGraph::emit(const NodeSpec& spec, const LogEntry& entry, HandlerContext& ctx) {
  const auto& g = graph_.name;
  const auto out = Operand::decode(entry.payload);
  for (const auto& e : graph_.edges) {
    if (e.from != spec.id) continue;
    const auto id = operand_id(g, e.to, e.port, out.iteration, out.value);
    const auto log = input_log(g, e.to, e.port);
    const auto& target = graph_.placement.at(e.to);
    if (target == ctx.node()) {
      ctx.append(log, out.encode(), id);
    } else {
      ctx.remote_append(target, log, out.encode(), id);
    }
  }
}

bool DeployedGraph::append_to(const std::string& node, const std::string& log, const Bytes& payload,
                              const MessageId& id) {
  return placed(node).append(log, payload, id).has_value();
}

bool DeployedGraph::inject(const std::string& external, std::uint64_t iteration, const Value& value) {
  const auto* x = graph_.find_external(external);
  if (x == nullptr) throw Error(Errc::invalid_argument, "no external input '" + external + "'");
  const auto* spec = graph_.find(x->to);
  const PortSpec* port = nullptr;
  for (const auto& p : spec->inputs) {
    if (p.name == x->port) port = &p;
  }
  if (!value.fits(port->type)) {
    throw Error(Errc::type_mismatch, external + " takes " + port->type.str());
  }
  const auto log = input_log(graph_.name, x->to, x->port);
  auto& consumer = placed(x->to);
  if (consumer.up()) {
    const auto& l = consumer.store().get(log);
    if (auto earlier = find_operand(l, iteration, l.next_seq() - 1)) {
      if (earlier->second == value) return true;
      throw Error(Errc::double_assignment_conflict,
                  external + " iteration " + std::to_string(iteration) + " already holds " +
                      earlier->second.str());
    }
  }
  const Operand op{iteration, value};
  const auto id = operand_id(graph_.name, x->to, x->port, iteration, value);
  auto& source = *nodes_.at(x->source);
  if (source.id() == consumer.id()) return source.append(log, op.encode(), id).has_value();
  return source.remote_append(consumer.id(), log, op.encode(), id);
}

void DeployedGraph::inject_from(HandlerContext& ctx, const std::string& external, std::uint64_t iteration,
                                const Value& value) {
  const auto* x = graph_.find_external(external);
  if (x == nullptr) throw Error(Errc::invalid_argument, "no external input '" + external + "'");
  if (x->source != ctx.node()) {
    throw Error(Errc::invalid_argument, external + " is fed from " + x->source + ", not " + ctx.node());
  }
  for (const auto& p : graph_.find(x->to)->inputs) {
    if (p.name == x->port && !value.fits(p.type)) {
      throw Error(Errc::type_mismatch, external + " takes " + p.type.str());
    }
  }
  const auto log = input_log(graph_.name, x->to, x->port);
  const auto id = operand_id(graph_.name, x->to, x->port, iteration, value);
  const auto& target = graph_.placement.at(x->to);
  if (target == ctx.node()) {
    ctx.append(log, Operand{iteration, value}.encode(), id);
  } else {
    ctx.remote_append(target, log, Operand{iteration, value}.encode(), id);
  }
}

bool DeployedGraph::complete_task(const std::string& node, std::uint64_t iteration,
                                  const Value& result) {
  const auto* spec = graph_.find(node);
  if (spec == nullptr || !spec->embedded) {
    throw Error(Errc::invalid_argument, "'" + node + "' is not an embedded node");
  }
  if (!result.fits(spec->output)) {
    throw Error(Errc::type_mismatch, node + " result must be " + spec->output.str());
  }
  return append_to(node, output_log(graph_.name, node), Operand{iteration, result}.encode(),
                   output_id(graph_.name, node, iteration));
}

void DeployedGraph::resume() {
  const auto& g = graph_.name;
  for (const auto& spec : graph_.nodes) {
    auto& host = placed(spec.id);
    if (!host.up()) continue;
    std::vector<const logstore::Log*> ports;
    for (const auto& p : spec.inputs) {
      const auto* log = host.store().find(input_log(g, spec.id, p.name));
      if (log == nullptr) {
        throw Error(Errc::corrupt_graph_state, "missing operand log for " + spec.id + "." + p.name);
      }
      ports.push_back(log);
    }
    const auto* out = host.store().find(output_log(g, spec.id));
    const auto* tasks = host.store().find(task_log(g, spec.id));
    if (out == nullptr || (spec.embedded && tasks == nullptr)) {
      throw Error(Errc::corrupt_graph_state, "missing output log for " + spec.id);
    }
    // Candidate iterations come from the first port; strictness needs all.
    const auto first = ports[0]->scan(ports[0]->earliest_seq(), ports[0]->next_seq() - 1);
    for (const auto& e : first.entries) {
      const auto it = Operand::decode(e.payload).iteration;
      std::vector<Value> inputs;
      for (const auto* log : ports) {
        auto v = find_operand(*log, it, log->next_seq() - 1);
        if (!v) break;
        inputs.push_back(std::move(v->second));
      }
      if (inputs.size() != ports.size()) continue;
      if (find_operand(*out, it, out->next_seq() - 1)) continue;
      if (spec.embedded) {
        TaskRequest req{g, spec.id, spec.op, it, std::move(inputs)};
        host.append(task_log(g, spec.id), req.encode(),
                    MessageIdBuilder().add("df").add(g).add(spec.id).add("task").add(it).finish());
      } else {
        host.append(output_log(g, spec.id), Operand{it, compute(spec, inputs)}.encode(),
                    output_id(g, spec.id, it));
      }
    }
  }
}

std::optional<Value> DeployedGraph::output(const std::string& node, std::uint64_t iteration) const {
  const auto& log = placed(node).store().get(output_log(graph_.name, node));
  auto v = find_operand(log, iteration, log.next_seq() - 1);
  if (!v) return std::nullopt;
  return v->second;
}

std::vector<Operand> DeployedGraph::outputs(const std::string& node) const {
  const auto& log = placed(node).store().get(output_log(graph_.name, node));
  std::vector<Operand> out;
  for (const auto& e : log.scan(log.earliest_seq(), log.next_seq() - 1).entries) {
    out.push_back(Operand::decode(e.payload));
  }
  return out;
}

std::optional<TaskRequest> DeployedGraph::task(const std::string& node, std::uint64_t iteration) const {
  const auto& log = placed(node).store().get(task_log(graph_.name, node));
  for (const auto& e : log.scan(log.earliest_seq(), log.next_seq() - 1).entries) {
    auto t = TaskRequest::decode(e.payload);
    if (t.iteration == iteration) return t;
  }
  return std::nullopt;
}

}  // namespace fabric::dataflow
