/*
 * src/pipeline/cups.cpp
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

#include "fabric/pipeline/cups.hpp"

#include <algorithm>
#include <set>

#include "fabric/common/error.hpp"
#include "fabric/dataflow/runtime.hpp"
#include "fabric/logstore/device.hpp"

namespace fabric::pipeline {

using dataflow::DeployedGraph;
using dataflow::Type;
using dataflow::Value;
using events::FabricNode;
using events::HandlerContext;
using logstore::LogEntry;

std::vector<netsim::LinkSpec> default_cups_links() {
  auto link = [](const char* a, const char* b, double mean_ms, double sd_ms, double capacity_mbps) {
    netsim::LinkSpec l;
    l.a = a;
    l.b = b;
    l.latency_mean_ms = mean_ms;
    l.latency_sd_ms = sd_ms;
    l.capacity_mbps = capacity_mbps;
    return l;
  };
  // Path SDs of 8.5, 0.4 and 0.5 ms one way; the radio hop carries what
  // the wired UNL hop does not.
  return {
      link(kStation, kEdge, 21.0, 8.49, 48.83),
      link(kEdge, kRepo, 4.25, 0.4, 0),
      link(kRepo, kHpc, 23.0, 0.5, 0),
  };
}

void CupsConfig::validate() const {
  auto bad = [](const std::string& what) { throw Error(Errc::scenario_invalid, what); };
  if (duration < weather.cadence * static_cast<std::int64_t>(2 * window_size)) {
    bad("duration must cover at least two windows");
  }
  if (window_size < 2) bad("window_size must be at least 2");
  if (!(alpha > 0 && alpha < 1)) bad("alpha must lie in (0, 1)");
  if (channels.empty()) bad("at least one channel is required");
  if (weather.cadence <= Duration{0}) bad("cadence must be positive");
  if (station_id.empty() || station_id.size() > 32) bad("station_id must be 1..32 bytes");
  std::set<std::string> names{kStation, kEdge, kRepo, kHpc};
  for (const auto& l : links) {
    if (!names.count(l.a) || !names.count(l.b)) bad("link " + l.a + "-" + l.b + " names an unknown node");
  }
}

std::size_t CupsResult::alerts() const {
  return static_cast<std::size_t>(
      std::count_if(detections.begin(), detections.end(), [](const Detection& d) { return d.vote; }));
}

NodeState dump_logs(const FabricNode& node, const std::vector<std::string>& skip) {
  NodeState out;
  for (const auto& name : node.store().names()) {
    if (std::find(skip.begin(), skip.end(), name) != skip.end()) continue;
    const auto& log = node.store().get(name);
    auto& d = out[name];
    d.next_seq = log.next_seq();
    for (const auto& e : log.scan(log.earliest_seq(), log.next_seq() - 1).entries) {
      d.entries.emplace_back(e.seq, e.message_id.hex(), e.payload);
    }
  }
  return out;
}

namespace {

Bytes encode_detection(std::uint64_t iteration, const std::vector<double>& detail) {
  ByteWriter w;
  w.u64(iteration).u32(static_cast<std::uint32_t>(detail.size()));
  for (double x : detail) w.f64(x);
  return w.take();
}

class Pipeline {
 public:
  explicit Pipeline(const CupsConfig& c) : cfg_(c), sim_(c.seed), net_(sim_) {}

  CupsResult run();

 private:
  void build_network();
  void build_nodes();
  void build_graph();
  void bind_handlers();
  void schedule_station();
  void relay(const LogEntry& e, HandlerContext& ctx);
  void window(const LogEntry& e, HandlerContext& ctx);
  void trigger(const LogEntry& e, HandlerContext& ctx);
  void finish_task(const pilot::TaskRecord& t);
  void store_result(std::uint64_t iteration, Value result);
  void audit(const pilot::AuditEvent& e);
  void flush_audit();
  bool settled() const;
  std::uint64_t index_of(SimTime t) const {
    return static_cast<std::uint64_t>((t - SimTime{0}).count() / cfg_.weather.cadence.count());
  }
  SimTime window_end(std::uint64_t k) const {
    return SimTime{0} + cfg_.weather.cadence * static_cast<std::int64_t>((k + 1) * cfg_.window_size - 1);
  }
  FabricNode& node(const std::string& n) { return *nodes_.at(n); }

  CupsConfig cfg_;
  netsim::Simulator sim_;
  netsim::Network net_;
  std::map<std::string, std::unique_ptr<FabricNode>> nodes_;
  std::unique_ptr<DeployedGraph> graph_;
  std::unique_ptr<pilot::BatchFacility> facility_;
  std::unique_ptr<pilot::PilotController> controller_;
  std::vector<TelemetryRecord> telemetry_;
  std::map<std::uint64_t, HopTiming> hops_;
  std::map<std::uint64_t, SimTime> detected_at_;
  std::vector<pilot::AuditEvent> pending_audit_;
  std::uint64_t audit_seq_ = 0;
  std::uint64_t probes_ = 0;
  std::uint64_t crashes_ = 0;
  std::vector<std::string> violations_;
};

void Pipeline::build_network() {
  for (const auto* n : {kStation, kEdge, kRepo, kHpc}) net_.add_node(n);
  for (const auto& l : cfg_.links) net_.add_link(l);
  for (const auto& [a, b] : {std::pair{kStation, kEdge}, std::pair{kEdge, kRepo}, std::pair{kRepo, kHpc}}) {
    if (!net_.reachable(a, b)) throw Error(Errc::scenario_invalid, std::string(a) + " cannot reach " + b);
  }
}

void Pipeline::build_nodes() {
  for (const auto* n : {kStation, kEdge, kRepo, kHpc}) {
    events::NodeConfig nc;
    nc.id = n;
    nc.client = cfg_.client;
    nodes_[n] = std::make_unique<FabricNode>(net_, std::make_shared<logstore::MemoryBackend>(), nc);
  }
  for (const auto* n : {kEdge, kRepo, kHpc}) {
    FabricNode* self = nodes_.at(n).get();
    self->set_crash_probe([this, self](const events::CrashPoint&) {
      const auto k = probes_++;
      if (cfg_.crash_at && k == *cfg_.crash_at) {
        ++crashes_;
        sim_.schedule_after(cfg_.restart_after, "restart", [self] { self->restart(); }, self->id());
        throw events::SimulatedCrash();
      }
    });
  }
  node(kEdge).ensure_log(kTelemetryLog, 1024, 4096);
  node(kRepo).ensure_log(kTelemetryLog, 1024, 4096);
  node(kRepo).ensure_log(kAlertLog, 1024, 4096);
  node(kHpc).ensure_log(kAuditLog, 512, 65536);
}

void Pipeline::build_graph() {
  const auto channels = cfg_.channels.size();
  const auto win = Type::fvec(static_cast<std::uint32_t>(cfg_.window_size * channels));
  dataflow::DataflowGraph g;
  g.name = "cups";
  g.nodes = {
      {"cur_window", {{"in", win}}, win, "identity"},
      {"prev_window", {{"in", win}}, win, "identity"},
      {"detect", {{"cur", win}, {"prev", win}}, Type::fvec(static_cast<std::uint32_t>(7 * channels + 1)), "change"},
      {"cfd", {{"alert", Type::fvec(2)}}, Type::fvec(3), "cfd", true},
  };
  g.edges = {{"cur_window", "detect", "cur"}, {"prev_window", "detect", "prev"}};
  g.externals = {{"cur", "cur_window", "in", kEdge}, {"prev", "prev_window", "in", kEdge}, {"alert", "cfd", "alert", kRepo}};
  g.placement = {{"cur_window", kEdge}, {"prev_window", kEdge}, {"detect", kRepo}, {"cfd", kHpc}};
  auto ops = dataflow::OpRegistry::with_builtins();
  ops.add("change", change_op(cfg_.alpha, channels, cfg_.window_size));
  ops.add("cfd", [](const std::vector<Value>&) -> Value {
    throw Error(Errc::invalid_argument, "cfd runs on the pilot, not inline");
  });
  DeployedGraph::Nodes placement;
  for (auto& [n, p] : nodes_) placement[n] = p.get();
  graph_ = DeployedGraph::deploy(std::move(g), placement, std::move(ops));

  graph_->on_task([this](const dataflow::TaskRequest& t) {
    const auto& in = t.inputs.at(0).as_fvec();
    controller_->submit_task(cfg_.task, SimTime{0} + from_seconds(in.at(0)), "cups/" + std::to_string(t.iteration));
  });
}

void Pipeline::bind_handlers() {
  node(kEdge).handlers().add("cups/relay", [this](const LogEntry& e, HandlerContext& ctx) { relay(e, ctx); });
  node(kEdge).handlers().add("cups/window", [this](const LogEntry& e, HandlerContext& ctx) { window(e, ctx); });
  node(kEdge).bind(kTelemetryLog, "cups/relay");
  node(kEdge).bind(kTelemetryLog, "cups/window");
  node(kRepo).handlers().add("cups/trigger", [this](const LogEntry& e, HandlerContext& ctx) { trigger(e, ctx); });
  node(kRepo).bind(DeployedGraph::output_log("cups", "detect"), "cups/trigger");

  node(kEdge).add_observer([this](const std::string& log, logstore::Seq seq) {
    if (log != kTelemetryLog) return;
    const auto r = TelemetryRecord::decode(node(kEdge).store().get(log).read(seq).payload);
    auto& h = hops_[index_of(r.timestamp)];
    if (!h.at_edge) h.at_edge = sim_.now();
  });
  const auto detect_out = DeployedGraph::output_log("cups", "detect");
  node(kRepo).add_observer([this, detect_out](const std::string& log, logstore::Seq seq) {
    if (log == kTelemetryLog) {
      const auto r = TelemetryRecord::decode(node(kRepo).store().get(log).read(seq).payload);
      auto& h = hops_[index_of(r.timestamp)];
      if (!h.at_repo) h.at_repo = sim_.now();
    } else if (log == detect_out) {
      const auto op = dataflow::Operand::decode(node(kRepo).store().get(log).read(seq).payload);
      detected_at_.emplace(op.iteration, sim_.now());
    }
  });
}

void Pipeline::relay(const LogEntry& e, HandlerContext& ctx) {
  ctx.remote_append(kRepo, kTelemetryLog, e.payload, e.message_id);
}

void Pipeline::window(const LogEntry& e, HandlerContext& ctx) {
  const auto rec = TelemetryRecord::decode(e.payload);
  const auto w = cfg_.window_size;
  const auto k = index_of(rec.timestamp) / w;
  std::map<std::uint64_t, TelemetryRecord> members;
  for (const auto& t : ctx.tail(kTelemetryLog, e.seq, 2 * w)) {
    auto r = TelemetryRecord::decode(t.payload);
    const auto i = index_of(r.timestamp);
    if (i / w == k) members.emplace(i, std::move(r));
  }
  if (members.size() != w) return;  // partial windows are never evaluated
  Window win;
  for (auto& [i, r] : members) win.records.push_back(std::move(r));
  validate_window(win, w, cfg_.weather.cadence);
  std::vector<double> v;
  for (auto c : cfg_.channels) {
    const auto xs = win.values(c);
    v.insert(v.end(), xs.begin(), xs.end());
  }
  const auto value = Value::of(std::move(v));
  if (k >= 1) graph_->inject_from(ctx, "cur", k, value);
  graph_->inject_from(ctx, "prev", k + 1, value);
}

void Pipeline::trigger(const LogEntry& e, HandlerContext& ctx) {
  const auto op = dataflow::Operand::decode(e.payload);
  const auto& detail = op.value.as_fvec();
  ctx.append(kAlertLog, encode_detection(op.iteration, detail),
             MessageIdBuilder().add("cups").add("alert").add(op.iteration).finish());
  if (detail.back() != 1.0) return;
  const double end_s = to_seconds(window_end(op.iteration) - SimTime{0});
  graph_->inject_from(ctx, "alert", op.iteration, Value::of(std::vector<double>{end_s, static_cast<double>(op.iteration)}));
}

void Pipeline::finish_task(const pilot::TaskRecord& t) {
  const auto iteration = std::stoull(t.key->substr(5));
  store_result(iteration, Value::of(std::vector<double>{to_seconds(t.telemetry_time - SimTime{0}),
                                                        to_seconds(t.runtime), static_cast<double>(iteration)}));
}

void Pipeline::store_result(std::uint64_t iteration, Value result) {
  // The HPC node may be down; the result waits on the pilot side.
  if (!graph_->complete_task("cfd", iteration, result)) {
    sim_.schedule_after(from_seconds(1), "cfd-result-retry",
                        [this, iteration, result] { store_result(iteration, result); });
  }
}

void Pipeline::audit(const pilot::AuditEvent& e) {
  pending_audit_.push_back(e);
  flush_audit();
}

void Pipeline::flush_audit() {
  auto& hpc = node(kHpc);
  while (!pending_audit_.empty() && hpc.up()) {
    const auto id = MessageIdBuilder().add("pilot-audit").add(audit_seq_).finish();
    hpc.append(kAuditLog, pending_audit_.front().encode(), id);
    pending_audit_.erase(pending_audit_.begin());
    ++audit_seq_;
  }
}

void Pipeline::schedule_station() {
  telemetry_ = generate_telemetry(cfg_.weather, cfg_.seed, cfg_.duration, cfg_.station_id);
  for (std::size_t i = 0; i < telemetry_.size(); ++i) {
    const auto& r = telemetry_[i];
    hops_[i].index = i;
    hops_[i].generated = r.timestamp;
    const auto id = MessageIdBuilder().add("cups").add("telemetry").add(cfg_.station_id).add(std::uint64_t{i}).finish();
    sim_.schedule_at(r.timestamp, "reading", [this, payload = r.encode(), id] {
      node(kStation).remote_append(kEdge, kTelemetryLog, payload, id);
    });
  }
}

bool Pipeline::settled() const {
  for (const auto& t : controller_->tasks()) {
    if (!t.completed) return false;
    const auto k = std::stoull(t.key->substr(5));
    if (!graph_->output("cfd", k)) return false;
  }
  for (const auto& [n, p] : nodes_) {
    if (!p->up()) return false;
    if (p->forwarder().backlog() != 0) return false;
  }
  return controller_->waiting() == 0;
}

CupsResult Pipeline::run() {
  cfg_.validate();
  build_network();
  build_nodes();
  facility_ = std::make_unique<pilot::BatchFacility>(sim_, cfg_.system);
  controller_ = std::make_unique<pilot::PilotController>(*facility_, cfg_.cost, cfg_.controller);
  controller_->set_audit_sink([this](const pilot::AuditEvent& e) { audit(e); });
  controller_->on_complete([this](const pilot::TaskRecord& t) { finish_task(t); });
  build_graph();
  bind_handlers();
  controller_->start();
  schedule_station();

  const SimTime end = SimTime{0} + cfg_.duration;
  sim_.advance(end);
  const SimTime deadline = end + cfg_.drain;
  const Duration step = from_seconds(60);
  while (sim_.now() < deadline && !settled()) sim_.advance(std::min(deadline, sim_.now() + step));
  flush_audit();

  CupsResult out;
  out.telemetry = telemetry_;
  for (auto& [i, h] : hops_) out.hops.push_back(h);
  const auto& detect = node(kRepo).store().get(DeployedGraph::output_log("cups", "detect"));
  for (const auto& e : detect.scan(detect.earliest_seq(), detect.next_seq() - 1).entries) {
    const auto op = dataflow::Operand::decode(e.payload);
    Detection d;
    d.iteration = op.iteration;
    d.window_end = window_end(op.iteration);
    d.detected_at = detected_at_.count(op.iteration) ? detected_at_.at(op.iteration) : e.created_at;
    d.detail = op.value.as_fvec();
    d.vote = d.detail.back() == 1.0;
    out.detections.push_back(std::move(d));
  }
  std::sort(out.detections.begin(), out.detections.end(),
            [](const Detection& a, const Detection& b) { return a.iteration < b.iteration; });
  for (const auto& t : controller_->tasks()) {
    CfdRun r;
    r.iteration = std::stoull(t.key->substr(5));
    r.task = t;
    r.detected_at = detected_at_.count(r.iteration) ? detected_at_.at(r.iteration) : t.requested;
    if (t.completed) r.validity = r.detected_at + cfg_.duty_cycle() - *t.completed;
    out.runs.push_back(std::move(r));
  }
  out.audit = controller_->audit();
  out.boundaries = probes_;
  out.crashes = crashes_;
  out.finished = sim_.now();
  for (const auto* n : {kEdge, kRepo, kHpc}) out.state[n] = dump_logs(node(n), {kAuditLog});

  // Invariant monitor.
  auto& v = violations_;
  if (!settled()) v.push_back("pipeline did not settle before the drain deadline");
  const auto& repo_tel = node(kRepo).store().get(kTelemetryLog);
  if (repo_tel.next_seq() - 1 != telemetry_.size()) {
    v.push_back("repository holds " + std::to_string(repo_tel.next_seq() - 1) + " readings, expected " +
                std::to_string(telemetry_.size()));
  }
  std::set<std::uint64_t> voted;
  for (const auto& d : out.detections) {
    if (d.vote) voted.insert(d.iteration);
  }
  for (const auto& r : out.runs) {
    if (!voted.count(r.iteration)) v.push_back("CFD task " + std::to_string(r.iteration) + " without an alert");
    // Duty-cycle bound: trigger within one cycle plus a round trip.
    if (cfg_.crash_at == std::nullopt && r.task.requested - r.detected_at > cfg_.duty_cycle() + from_seconds(1)) {
      v.push_back("alert " + std::to_string(r.iteration) + " reached the pilot late");
    }
  }
  for (auto k : voted) {
    const bool ran = std::any_of(out.runs.begin(), out.runs.end(), [k](const CfdRun& r) {
      return r.iteration == k && r.task.completed.has_value();
    });
    if (!ran) v.push_back("alert " + std::to_string(k) + " produced no completed CFD run");
  }
  const auto windows = telemetry_.size() / cfg_.window_size;
  if (out.detections.size() > (windows > 0 ? windows - 1 : 0)) v.push_back("more detections than window pairs");
  out.violations = violations_;
  return out;
}

}  // namespace

CupsResult run_cups(const CupsConfig& config) {
  Pipeline p(config);
  return p.run();
}

}  // namespace fabric::pipeline
