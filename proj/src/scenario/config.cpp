/*
 * src/scenario/config.cpp
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

#include "fabric/scenario/config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <type_traits>

#include "fabric/common/error.hpp"
#include "json.hpp"

namespace fabric::scenario {

using nlohmann::json;

std::string_view to_string(Kind k) {
  switch (k) {
    case Kind::latency: return "latency";
    case Kind::slicing: return "slicing";
    case Kind::cups: return "cups";
    case Kind::queue_sweep: return "queue_sweep";
  }
  return "?";
}

void ScenarioConfig::set_seed(std::uint64_t s) {
  seed = s;
  if (auto* c = std::get_if<CupsSpec>(&spec)) c->config.seed = s;
  if (auto* q = std::get_if<QueueSweepSpec>(&spec)) q->base.seed = s;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& why) {
  throw Error(Errc::config_error, (path.empty() ? std::string("<root>") : path) + ": " + why);
}

template <typename T>
T convert(const json& v, const std::string& path) {
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(path, "expected true or false");
    return v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  } else if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) fail(path, "expected a number");
    return v.get<double>();
  } else {
    static_assert(std::is_integral_v<T>);
    if (!v.is_number_integer()) fail(path, "expected an integer");
    if (v.is_number_unsigned()) {
      const auto u = v.get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) fail(path, "out of range");
      return static_cast<T>(u);
    }
    const auto s = v.get<std::int64_t>();
    if constexpr (std::is_unsigned_v<T>) {
      if (s < 0) fail(path, "must not be negative");
    } else {
      if (s < std::numeric_limits<T>::min() || s > std::numeric_limits<T>::max()) fail(path, "out of range");
    }
    return static_cast<T>(s);
  }
}

// One JSON object being read. Keys are marked as they are consumed so that
// done() can reject whatever is left.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const std::string& path() const { return path_; }

  const json* sub(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }

  template <typename T>
  std::optional<T> opt(const std::string& key) {
    const json* v = sub(key);
    if (!v) return std::nullopt;
    return convert<T>(*v, at(key));
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    auto v = opt<T>(key);
    return v ? *v : fallback;
  }

  template <typename T>
  T need(const std::string& key) {
    auto v = opt<T>(key);
    if (!v) fail(at(key), "required key missing");
    return *v;
  }

  double positive(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!(v > 0) || !std::isfinite(v)) fail(at(key), "must be a positive number");
    return v;
  }

  double non_negative(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!(v >= 0) || !std::isfinite(v)) fail(at(key), "must be a non-negative number");
    return v;
  }

  double probability(const std::string& key, double fallback) {
    const double v = get<double>(key, fallback);
    if (!(v >= 0 && v <= 1)) fail(at(key), "must lie in [0, 1]");
    return v;
  }

  /// Iterates an optional array of objects.
  template <typename F>
  bool each(const std::string& key, F&& fn) {
    const json* v = sub(key);
    if (!v) return false;
    if (!v->is_array()) fail(at(key), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) fn((*v)[i], at(key) + "[" + std::to_string(i) + "]");
    return true;
  }

  void done() const {
    for (const auto& [k, v] : j_.items()) {
      if (!seen_.count(k)) fail(at(k), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

netsim::LinkSpec parse_link(const json& j, const std::string& path) {
  Obj o(j, path);
  netsim::LinkSpec l;
  l.a = o.need<std::string>("a");
  l.b = o.need<std::string>("b");
  l.latency_mean_ms = o.non_negative("latency_mean_ms", 0);
  l.latency_sd_ms = o.non_negative("latency_sd_ms", 0);
  l.loss_prob = o.probability("loss_prob", 0);
  if (l.loss_prob >= 1) fail(o.at("loss_prob"), "a link that loses every frame never delivers");
  l.dup_prob = o.probability("dup_prob", 0);
  l.reorder_jitter_ms = o.non_negative("reorder_jitter_ms", 0);
  l.capacity_mbps = o.non_negative("capacity_mbps", 0);
  l.directed = o.get<bool>("directed", false);
  o.each("partitions", [&](const json& p, const std::string& pp) {
    Obj po(p, pp);
    const double start = po.non_negative("start_s", 0);
    const double end = po.positive("end_s", 0);
    if (end <= start) fail(pp, "end_s must be after start_s");
    l.partitions.push_back({SimTime{from_seconds(start)}, SimTime{from_seconds(end)}});
    po.done();
  });
  o.done();
  if (l.a.empty() || l.b.empty() || l.a == l.b) fail(path, "a link joins two distinct named nodes");
  return l;
}

std::vector<netsim::LinkSpec> parse_links(Obj& o, const std::string& key) {
  std::vector<netsim::LinkSpec> out;
  o.each(key, [&](const json& j, const std::string& p) { out.push_back(parse_link(j, p)); });
  return out;
}

NodeDecl parse_node(const json& j, const std::string& path) {
  Obj o(j, path);
  NodeDecl n;
  n.id = o.need<std::string>("id");
  n.ue_efficiency = o.positive("ue_efficiency", 1.0);
  if (n.ue_efficiency > 1.0) fail(o.at("ue_efficiency"), "must lie in (0, 1]");
  o.done();
  if (n.id.empty()) fail(o.at("id"), "must not be empty");
  return n;
}

pilot::QueueDelayModel parse_queue_delay(const json& j, const std::string& path) {
  Obj o(j, path);
  pilot::QueueDelayModel q;
  const auto kind = o.get<std::string>("kind", "constant");
  try {
    q.kind = pilot::parse_queue_delay_kind(kind);
  } catch (const Error& e) {
    fail(o.at("kind"), e.detail());
  }
  q.seconds = o.non_negative("seconds", 0);
  q.log_mu = o.get<double>("log_mu", q.log_mu);
  q.log_sigma = o.non_negative("log_sigma", q.log_sigma);
  q.cap_seconds = o.non_negative("cap_s", q.cap_seconds);
  o.done();
  if (q.seconds > q.cap_seconds) fail(o.at("seconds"), "exceeds cap_s");
  return q;
}

pipeline::ChannelModel parse_channel_model(const json& j, const std::string& path,
                                           pipeline::ChannelModel m) {
  Obj o(j, path);
  m.mean = o.get<double>("mean", m.mean);
  m.noise_sd = o.non_negative("noise_sd", m.noise_sd);
  if (o.sub("shifts")) {
    m.shifts.clear();
    o.each("shifts", [&](const json& s, const std::string& sp) {
      Obj so(s, sp);
      const double at = so.non_negative("at_s", 0);
      const double mean = so.need<double>("mean");
      so.done();
      if (!m.shifts.empty() && from_seconds(at) <= m.shifts.back().first) fail(sp, "shifts must be in increasing time order");
      m.shifts.emplace_back(SimTime{from_seconds(at)}, mean);
    });
  }
  o.done();
  return m;
}

pipeline::CupsConfig parse_cups_config(Obj& o, std::uint64_t seed) {
  pipeline::CupsConfig c;
  c.seed = seed;
  c.duration = from_seconds(o.positive("duration_s", to_seconds(c.duration)));
  c.drain = from_seconds(o.non_negative("drain_s", to_seconds(c.drain)));
  c.station_id = o.get<std::string>("station_id", c.station_id);
  c.alpha = o.get<double>("alpha", c.alpha);
  c.window_size = o.get<std::size_t>("window_size", c.window_size);
  c.weather.cadence = from_seconds(o.positive("cadence_s", to_seconds(c.weather.cadence)));
  if (const json* ch = o.sub("channels")) {
    if (!ch->is_array()) fail(o.at("channels"), "expected an array");
    c.channels.clear();
    for (std::size_t i = 0; i < ch->size(); ++i) {
      const auto p = o.at("channels") + "[" + std::to_string(i) + "]";
      const auto name = convert<std::string>((*ch)[i], p);
      try {
        c.channels.push_back(pipeline::parse_channel(name));
      } catch (const Error& e) {
        fail(p, e.detail());
      }
    }
  }
  if (const json* w = o.sub("weather")) {
    Obj wo(*w, o.at("weather"));
    for (auto ch : {pipeline::Channel::wind_speed, pipeline::Channel::wind_direction,
                    pipeline::Channel::temperature, pipeline::Channel::humidity}) {
      const std::string key(pipeline::to_string(ch));
      if (const json* m = wo.sub(key)) {
        c.weather.channel(ch) = parse_channel_model(*m, wo.at(key), c.weather.channel(ch));
      }
    }
    wo.done();
  }
  if (o.sub("links")) c.links = parse_links(o, "links");
  c.client.size_cache = o.get<bool>("size_cache", c.client.size_cache);
  if (const json* s = o.sub("system")) {
    Obj so(*s, o.at("system"));
    c.system.total_nodes = so.get<std::uint32_t>("total_nodes", c.system.total_nodes);
    if (c.system.total_nodes == 0) fail(so.at("total_nodes"), "must be at least 1");
    c.system.cores_per_node = so.get<std::uint32_t>("cores_per_node", c.system.cores_per_node);
    if (c.system.cores_per_node == 0) fail(so.at("cores_per_node"), "must be at least 1");
    c.system.max_runtime = from_seconds(so.positive("max_runtime_s", to_seconds(c.system.max_runtime)));
    if (const json* q = so.sub("queue_delay")) c.system.queue_delay = parse_queue_delay(*q, so.at("queue_delay"));
    so.done();
  }
  if (const json* s = o.sub("controller")) {
    Obj so(*s, o.at("controller"));
    if (const auto st = so.opt<std::string>("strategy")) {
      try {
        c.controller.strategy = pilot::parse_strategy(*st);
      } catch (const Error& e) {
        fail(so.at("strategy"), e.detail());
      }
    }
    c.controller.count_queued = so.get<bool>("count_queued", c.controller.count_queued);
    c.controller.placeholder_nodes = so.get<std::uint32_t>("placeholder_nodes", c.controller.placeholder_nodes);
    if (c.controller.placeholder_nodes == 0) fail(so.at("placeholder_nodes"), "must be at least 1");
    so.done();
  }
  if (const json* s = o.sub("cost")) {
    Obj so(*s, o.at("cost"));
    c.cost.per_extra_node = so.non_negative("per_extra_node", c.cost.per_extra_node);
    if (so.sub("points")) {
      c.cost.by_cores.clear();
      so.each("points", [&](const json& p, const std::string& pp) {
        Obj po(p, pp);
        const auto cores = po.need<std::uint32_t>("cores");
        const double mean = po.positive("mean_s", 1);
        const double sd = po.non_negative("sd_s", 0);
        po.done();
        if (cores == 0) fail(pp + ".cores", "must be at least 1");
        if (!c.cost.by_cores.emplace(cores, pilot::CfdCostModel::Point{mean, sd}).second) {
          fail(pp + ".cores", "duplicate core count");
        }
      });
      if (c.cost.by_cores.empty()) fail(so.at("points"), "needs at least one point");
    }
    so.done();
  }
  if (const json* s = o.sub("task")) {
    Obj so(*s, o.at("task"));
    c.task.data_size = so.get<std::uint64_t>("data_size", c.task.data_size);
    c.task.threshold = so.get<std::uint64_t>("threshold", c.task.threshold);
    if (c.task.threshold == 0) fail(so.at("threshold"), "must be positive");
    c.task.estimated_runtime = from_seconds(so.positive("estimated_runtime_s", to_seconds(c.task.estimated_runtime)));
    c.task.cores = so.get<std::uint32_t>("cores", c.task.cores);
    if (c.task.cores == 0) fail(so.at("cores"), "must be at least 1");
    so.done();
  }
  if (const json* s = o.sub("crash")) {
    Obj so(*s, o.at("crash"));
    c.crash_at = so.need<std::uint64_t>("at");
    c.restart_after = from_seconds(so.positive("restart_after_s", to_seconds(c.restart_after)));
    so.done();
  }
  return c;
}

void validate_cups(const pipeline::CupsConfig& c, const std::string& path) {
  try {
    c.validate();
  } catch (const Error& e) {
    fail(path, e.detail());
  }
}

LatencySpec parse_latency(Obj& o) {
  LatencySpec s;
  o.each("nodes", [&](const json& j, const std::string& p) { s.nodes.push_back(parse_node(j, p)); });
  s.links = parse_links(o, "links");
  o.each("paths", [&](const json& j, const std::string& p) {
    Obj po(j, p);
    PathDecl d{po.need<std::string>("name"), po.need<std::string>("from"), po.need<std::string>("to")};
    po.done();
    if (d.from == d.to) fail(p, "from and to must differ");
    s.paths.push_back(std::move(d));
  });
  s.payload_bytes = o.get<std::uint32_t>("payload_bytes", s.payload_bytes);
  s.messages = o.get<int>("messages", s.messages);
  s.size_cache = o.get<bool>("size_cache", s.size_cache);
  s.connection_setup = o.get<bool>("connection_setup", s.connection_setup);
  o.done();

  if (s.nodes.empty()) fail(o.at("nodes"), "at least one node is required");
  if (s.paths.empty()) fail(o.at("paths"), "at least one path is required");
  if (s.payload_bytes == 0 || s.payload_bytes > 65536) fail(o.at("payload_bytes"), "must lie in [1, 65536]");
  if (s.messages < 2) fail(o.at("messages"), "must be at least 2 (the first is discarded)");
  std::set<std::string> ids;
  for (const auto& n : s.nodes) {
    if (!ids.insert(n.id).second) fail(o.at("nodes"), "duplicate node " + n.id);
  }
  for (const auto& l : s.links) {
    if (!ids.count(l.a) || !ids.count(l.b)) fail(o.at("links"), "link " + l.a + "-" + l.b + " names an unknown node");
  }
  for (const auto& p : s.paths) {
    if (!ids.count(p.from) || !ids.count(p.to)) fail(o.at("paths"), "path " + p.name + " names an unknown node");
  }
  return s;
}

SlicingSpec parse_slicing(Obj& o) {
  SlicingSpec s;
  s.gnb = o.get<std::string>("gnb", s.gnb);
  o.each("ues", [&](const json& j, const std::string& p) { s.ues.push_back(parse_node(j, p)); });
  s.base_capacity_mbps = o.positive("base_capacity_mbps", s.base_capacity_mbps);
  if (const json* fit = o.sub("calibration")) {
    // Published (fraction, Mbps) points per UE; overrides the base capacity
    // and the efficiencies with a proportional fit.
    if (!fit->is_object()) fail(o.at("calibration"), "expected an object of UE -> [[fraction, mbps], ...]");
    std::map<netsim::NodeId, std::vector<std::pair<double, double>>> points;
    for (const auto& [ue, arr] : fit->items()) {
      const auto p = o.at("calibration") + "." + ue;
      if (!arr.is_array() || arr.empty()) fail(p, "expected a non-empty array of [fraction, mbps]");
      for (const auto& pt : arr) {
        if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number()) {
          fail(p, "expected [fraction, mbps] pairs");
        }
        points[ue].emplace_back(pt[0].get<double>(), pt[1].get<double>());
      }
    }
    const auto f = netsim::fit_ue_efficiency(points);
    s.base_capacity_mbps = f.base_capacity_mbps;
    for (auto& u : s.ues) {
      auto it = f.efficiency.find(u.id);
      if (it == f.efficiency.end()) fail(o.at("calibration"), "no points for UE " + u.id);
      u.ue_efficiency = it->second;
    }
  }
  s.latency_mean_ms = o.non_negative("latency_mean_ms", s.latency_mean_ms);
  s.interval_s = o.positive("interval_s", s.interval_s);
  s.samples = o.get<int>("samples", s.samples);
  s.noise.sd_mbps = o.non_negative("throughput_sd_mbps", s.noise.sd_mbps);
  s.noise.support_sds = o.positive("support_sds", s.noise.support_sds);
  o.done();
  if (s.ues.size() != 2) fail(o.at("ues"), "exactly two UEs share the radio link");
  if (s.ues[0].id == s.ues[1].id || s.ues[0].id == s.gnb || s.ues[1].id == s.gnb) {
    fail(o.at("ues"), "UE and gNB ids must be distinct");
  }
  if (s.samples < 2) fail(o.at("samples"), "must be at least 2");
  return s;
}

CupsSpec parse_cups(Obj& o, std::uint64_t seed) {
  CupsSpec s;
  s.sustained_tasks = o.get<int>("sustained_tasks", 0);
  if (s.sustained_tasks < 0) fail(o.at("sustained_tasks"), "must not be negative");
  s.histogram_bin_s = o.positive("histogram_bin_s", s.histogram_bin_s);
  s.config = parse_cups_config(o, seed);
  o.done();
  validate_cups(s.config, o.path());
  return s;
}

QueueSweepSpec parse_queue_sweep(Obj& o, std::uint64_t seed) {
  QueueSweepSpec s;
  const json* base = o.sub("base");
  if (!base) fail(o.at("base"), "required key missing");
  Obj bo(*base, o.at("base"));
  s.base = parse_cups_config(bo, seed);
  bo.done();
  validate_cups(s.base, o.at("base"));
  if (const json* st = o.sub("strategies")) {
    if (!st->is_array() || st->empty()) fail(o.at("strategies"), "expected a non-empty array");
    for (std::size_t i = 0; i < st->size(); ++i) {
      const auto p = o.at("strategies") + "[" + std::to_string(i) + "]";
      const auto name = convert<std::string>((*st)[i], p);
      try {
        s.strategies.push_back(pilot::parse_strategy(name));
      } catch (const Error& e) {
        fail(p, e.detail());
      }
    }
  } else {
    s.strategies = {pilot::Strategy::proactive, pilot::Strategy::reactive};
  }
  o.each("queue_delays", [&](const json& j, const std::string& p) { s.queue_delays.push_back(parse_queue_delay(j, p)); });
  o.done();
  if (s.queue_delays.empty()) fail(o.at("queue_delays"), "at least one queue delay model is required");
  return s;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::config_error, origin + ": not valid JSON: " + e.what());
  }
  try {
    Obj o(root, "");
    const auto schema = o.need<int>("schema");
    if (schema != kSchemaVersion) {
      fail("schema", "unsupported version " + std::to_string(schema) + " (expected " +
                         std::to_string(kSchemaVersion) + ")");
    }
    ScenarioConfig cfg;
    cfg.name = o.need<std::string>("name");
    if (cfg.name.empty()) fail("name", "must not be empty");
    cfg.seed = o.get<std::uint64_t>("seed", 1);
    const auto kind = o.need<std::string>("kind");
    const json* body = o.sub(kind);
    if (kind == "latency" || kind == "slicing" || kind == "cups" || kind == "queue_sweep") {
      if (!body) fail(kind, "required key missing (the section for kind \"" + kind + "\")");
    } else {
      fail("kind", "unknown kind \"" + kind + "\" (expected latency, slicing, cups or queue_sweep)");
    }
    o.done();
    Obj section(*body, kind);
    if (kind == "latency") cfg.spec = parse_latency(section);
    if (kind == "slicing") cfg.spec = parse_slicing(section);
    if (kind == "cups") cfg.spec = parse_cups(section, cfg.seed);
    if (kind == "queue_sweep") cfg.spec = parse_queue_sweep(section, cfg.seed);
    return cfg;
  } catch (const Error& e) {
    if (e.code() != Errc::config_error) throw;
    throw Error(Errc::config_error, origin + ": " + e.detail());
  }
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::config_error, path.string() + ": cannot open scenario file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

}  // namespace fabric::scenario
