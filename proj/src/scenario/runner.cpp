/*
 * src/scenario/runner.cpp
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

#include "fabric/scenario/runner.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <thread>

#include "fabric/common/error.hpp"
#include "fabric/pilot/controller.hpp"
#include "fabric/transport/client.hpp"

namespace fabric::scenario {

namespace {

double mean_of(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  if (xs.size() < 2) return 0;
  const double m = mean_of(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

Cell opt_seconds(const std::optional<SimTime>& t) {
  if (!t) return std::monostate{};
  return to_seconds(*t);
}

Cell opt_id(const std::optional<std::uint64_t>& v) {
  if (!v) return std::monostate{};
  return static_cast<std::int64_t>(*v);
}

std::int64_t as_int(std::uint64_t v) { return static_cast<std::int64_t>(v); }

// ---------------------------------------------------------------- latency

MetricsReport latency_report(const LatencySpec& spec, std::uint64_t seed) {
  MetricsReport r;
  const auto paths = measure_paths(spec, seed);
  Table summary{"latency", {"path", "from", "to", "n", "mean_ms", "sd_ms", "discarded_ms", "size_cache"}, {}, true};
  Table raw{"latency_samples", {"path", "index", "latency_ms", "discarded"}, {}, false};
  for (const auto& p : paths) {
    const auto& st = p.stats;
    summary.add({p.path.name, p.path.from, p.path.to, as_int(st.n), st.mean_ms, st.sd_ms, st.samples_ms.front(),
                 std::int64_t{spec.size_cache}});
    for (std::size_t i = 0; i < st.samples_ms.size(); ++i) {
      raw.add({p.path.name, as_int(i), st.samples_ms[i], std::int64_t{i == 0}});
    }
    r.summary[p.path.name + "/mean_ms"] = st.mean_ms;
    r.summary[p.path.name + "/sd_ms"] = st.sd_ms;
    if (st.n != static_cast<std::size_t>(spec.messages - 1)) {
      r.violations.push_back(p.path.name + ": kept " + std::to_string(st.n) + " samples, expected " +
                             std::to_string(spec.messages - 1));
    }
  }
  r.tables = {std::move(summary), std::move(raw)};
  return r;
}

// ---------------------------------------------------------------- slicing

MetricsReport slicing_report(const SlicingSpec& spec, std::uint64_t seed) {
  MetricsReport r;
  const auto curve = slicing_curve(spec, seed);
  Table table{"slicing_curve",
              {"k", "ue", "fraction", "n", "mean_mbps", "sd_mbps", "model_mbps", "mean_per_fraction", "other_ue",
               "other_fraction", "other_mean_mbps", "other_sd_mbps"},
              {},
              true};
  Table raw{"slicing_samples", {"k", "ue", "fraction", "sample", "start_s", "end_s", "bytes", "mbps"}, {}, false};
  std::vector<double> per_fraction;
  double sd_min = INFINITY, sd_max = 0;
  bool monotone = true;
  for (const auto& pt : curve) {
    const auto& h = pt.high;
    const auto& l = pt.low;
    table.add({std::int64_t{pt.k}, h.id, h.fraction, as_int(h.mbps.size()), h.mean_mbps, h.sd_mbps, h.model_mbps,
               h.mean_mbps / h.fraction, l.id, l.fraction, l.mean_mbps, l.sd_mbps});
    per_fraction.push_back(h.mean_mbps / h.fraction);
    sd_min = std::min(sd_min, h.sd_mbps);
    sd_max = std::max(sd_max, h.sd_mbps);
    if (&pt != &curve.front() && h.mean_mbps <= (&pt - 1)->high.mean_mbps) monotone = false;
    for (const auto* ue : {&l, &h}) {
      for (std::size_t i = 0; i < ue->records.size(); ++i) {
        const auto& rec = ue->records[i];
        raw.add({std::int64_t{pt.k}, ue->id, ue->fraction, as_int(i), to_seconds(rec.start), to_seconds(rec.end),
                 as_int(rec.bytes), ue->mbps[i]});
        if (ue->mbps[i] < 0) r.violations.push_back("negative throughput sample for " + ue->id);
      }
      if (ue->records.size() != static_cast<std::size_t>(spec.samples)) {
        r.violations.push_back("trial for " + ue->id + " returned " + std::to_string(ue->records.size()) + " samples");
      }
    }
    if (l.fraction + h.fraction > 1.0 + 1e-12) r.violations.push_back("slices oversubscribe the radio link");
  }
  const double pf_mean = mean_of(per_fraction);
  double spread = 0;
  for (double v : per_fraction) spread = std::max(spread, std::fabs(v / pf_mean - 1.0));
  r.summary["mean_mbps_at_10pct"] = curve.front().high.mean_mbps;
  r.summary["mean_mbps_at_90pct"] = curve.back().high.mean_mbps;
  r.summary["monotone"] = monotone ? 1 : 0;
  r.summary["mean_per_fraction"] = pf_mean;
  r.summary["max_relative_deviation"] = spread;
  r.summary["sd_min_mbps"] = sd_min;
  r.summary["sd_max_mbps"] = sd_max;
  r.summary["base_capacity_mbps"] = spec.base_capacity_mbps;
  r.tables = {std::move(table), std::move(raw)};
  return r;
}

// ---------------------------------------------------------------- cups

struct PilotTimes {
  std::map<std::uint64_t, SimTime> submitted, active;
};

PilotTimes pilot_times(const std::vector<pilot::AuditEvent>& audit) {
  PilotTimes t;
  for (const auto& e : audit) {
    if (e.kind == "pilot-submit" || e.kind == "placeholder-submit") t.submitted.emplace(e.pilot, e.time);
    if (e.kind == "pilot-active") t.active.emplace(e.pilot, e.time);
  }
  return t;
}

std::optional<SimTime> first_shift(const pipeline::CupsConfig& c) {
  std::optional<SimTime> out;
  for (auto ch : c.channels) {
    const auto& shifts = c.weather.channel(ch).shifts;
    if (!shifts.empty() && (!out || shifts.front().first < *out)) out = shifts.front().first;
  }
  return out;
}

Table task_table(const std::string& name, const pipeline::CupsResult& res, bool in_json) {
  const auto pt = pilot_times(res.audit);
  Table t{name,
          {"iteration", "task", "telemetry_s", "detected_s", "requested_s", "nodes", "pilot", "pilot_submitted_s",
           "pilot_active_s", "started_s", "completed_s", "runtime_s", "response_s", "validity_s", "validity_min"},
          {},
          in_json};
  for (const auto& run : res.runs) {
    const auto& task = run.task;
    auto lookup = [&](const std::map<std::uint64_t, SimTime>& m) -> Cell {
      if (!task.pilot) return std::monostate{};
      auto it = m.find(*task.pilot);
      if (it == m.end()) return std::monostate{};
      return to_seconds(it->second);
    };
    Cell response = std::monostate{}, validity = std::monostate{}, minutes = std::monostate{};
    if (task.completed) response = to_seconds(*task.completed - run.detected_at);
    if (run.validity) {
      validity = to_seconds(*run.validity);
      minutes = to_seconds(*run.validity) / 60.0;
    }
    t.add({as_int(run.iteration), as_int(task.id), to_seconds(task.telemetry_time), to_seconds(run.detected_at),
           to_seconds(task.requested), as_int(task.nodes_required), opt_id(task.pilot), lookup(pt.submitted),
           lookup(pt.active), opt_seconds(task.started), opt_seconds(task.completed), to_seconds(task.runtime),
           response, validity, minutes});
  }
  return t;
}

void collect_violations(const pipeline::CupsResult& res, std::vector<std::string>& violations,
                        const std::string& tag) {
  for (const auto& v : res.violations) violations.push_back(tag + v);
}

MetricsReport cups_report(const CupsSpec& spec) {
  MetricsReport r;
  const auto& cfg = spec.config;
  const auto res = pipeline::run_cups(cfg);
  collect_violations(res, r.violations, "");

  Table hops{"hops", {"index", "generated_s", "station_edge_ms", "edge_repo_ms", "station_repo_ms"}, {}, false};
  std::vector<double> se, er;
  for (const auto& h : res.hops) {
    Cell a = std::monostate{}, b = std::monostate{}, c = std::monostate{};
    if (h.at_edge) {
      se.push_back(to_ms(*h.at_edge - h.generated));
      a = se.back();
    }
    if (h.at_edge && h.at_repo) {
      er.push_back(to_ms(*h.at_repo - *h.at_edge));
      b = er.back();
    }
    if (h.at_repo) c = to_ms(*h.at_repo - h.generated);
    hops.add({as_int(h.index), to_seconds(h.generated), a, b, c});
  }

  std::vector<std::string> det_cols{"iteration", "window_end_s", "detected_s", "vote"};
  for (auto ch : cfg.channels) {
    for (const char* test : {"welch_p", "mann_whitney_p", "ks_p", "vote"}) {
      det_cols.push_back(std::string(pipeline::to_string(ch)) + "_" + test);
    }
  }
  Table dets{"detections", det_cols, {}, true};
  Table alerts{"alerts", {"iteration", "window_end_s", "detected_s", "delay_from_shift_s"}, {}, true};
  const auto shift = first_shift(cfg);
  std::optional<double> first_alert_delay;
  for (const auto& d : res.detections) {
    std::vector<Cell> row{as_int(d.iteration), to_seconds(d.window_end), to_seconds(d.detected_at),
                          std::int64_t{d.vote}};
    for (std::size_t c = 0; c < cfg.channels.size(); ++c) {
      const std::size_t base = 7 * c;
      const bool have = d.detail.size() >= base + 7;
      for (std::size_t idx : {base + 1, base + 3, base + 5, base + 6}) {
        row.push_back(have ? Cell{d.detail[idx]} : Cell{std::monostate{}});
      }
    }
    dets.add(std::move(row));
    if (d.vote) {
      Cell delay = std::monostate{};
      if (shift) {
        const double s = to_seconds(d.detected_at - *shift);
        delay = s;
        if (!first_alert_delay && s >= 0) first_alert_delay = s;
      }
      alerts.add({as_int(d.iteration), to_seconds(d.window_end), to_seconds(d.detected_at), delay});
    }
  }

  Table audit{"audit", {"time_s", "kind", "pilot", "task", "detail"}, {}, false};
  for (const auto& e : res.audit) audit.add({to_seconds(e.time), e.kind, as_int(e.pilot), as_int(e.task), e.detail});

  auto tasks = task_table("tasks", res, true);
  std::size_t completed = 0;
  std::optional<double> min_validity;
  for (const auto& run : res.runs) {
    if (run.task.completed) ++completed;
    if (run.validity) {
      const double v = to_seconds(*run.validity);
      min_validity = min_validity ? std::min(*min_validity, v) : v;
    }
  }

  r.summary["telemetry_records"] = static_cast<double>(res.telemetry.size());
  r.summary["detections"] = static_cast<double>(res.detections.size());
  r.summary["alerts"] = static_cast<double>(res.alerts());
  r.summary["cfd_runs"] = static_cast<double>(res.runs.size());
  r.summary["cfd_completed"] = static_cast<double>(completed);
  r.summary["station_edge_mean_ms"] = mean_of(se);
  r.summary["station_edge_sd_ms"] = sd_of(se);
  r.summary["edge_repo_mean_ms"] = mean_of(er);
  r.summary["edge_repo_sd_ms"] = sd_of(er);
  r.summary["duty_cycle_s"] = to_seconds(cfg.duty_cycle());
  r.summary["handler_boundaries"] = static_cast<double>(res.boundaries);
  r.summary["crashes"] = static_cast<double>(res.crashes);
  r.summary["finished_s"] = to_seconds(res.finished);
  if (first_alert_delay) r.summary["first_alert_delay_s"] = *first_alert_delay;
  if (min_validity) {
    r.summary["min_validity_s"] = *min_validity;
    r.summary["min_validity_min"] = *min_validity / 60.0;
  }

  r.tables = {std::move(tasks), std::move(alerts), std::move(dets), std::move(hops), std::move(audit)};

  if (spec.sustained_tasks > 0) {
    const auto sus = sustained_throughput(cfg, spec.sustained_tasks);
    Table t{"sustained", {"task", "started_s", "completed_s", "runtime_s"}, {}, false};
    std::vector<double> runtimes;
    for (const auto& task : sus.tasks) {
      t.add({as_int(task.id), opt_seconds(task.started), opt_seconds(task.completed), to_seconds(task.runtime)});
      runtimes.push_back(to_seconds(task.runtime));
    }
    if (sus.tasks.size() != static_cast<std::size_t>(spec.sustained_tasks)) {
      r.violations.push_back("sustained run completed " + std::to_string(sus.tasks.size()) + " of " +
                             std::to_string(spec.sustained_tasks) + " tasks");
    }
    Table hist{"runtime_histogram", {"bin_start_s", "bin_end_s", "count"}, {}, false};
    if (!runtimes.empty()) {
      const double w = spec.histogram_bin_s;
      const auto [lo, hi] = std::minmax_element(runtimes.begin(), runtimes.end());
      const auto first = static_cast<std::int64_t>(std::floor(*lo / w));
      const auto last = static_cast<std::int64_t>(std::floor(*hi / w));
      std::vector<std::int64_t> counts(static_cast<std::size_t>(last - first + 1), 0);
      for (double x : runtimes) ++counts[static_cast<std::size_t>(static_cast<std::int64_t>(std::floor(x / w)) - first)];
      for (std::size_t i = 0; i < counts.size(); ++i) {
        const double start = static_cast<double>(first + static_cast<std::int64_t>(i)) * w;
        hist.add({start, start + w, counts[i]});
      }
    }
    r.summary["sustained_tasks"] = static_cast<double>(sus.tasks.size());
    r.summary["sustained_interval_s"] = sus.interval_s;
    r.summary["sustained_interval_min"] = sus.interval_s / 60.0;
    r.summary["runtime_mean_s"] = mean_of(runtimes);
    r.summary["runtime_sd_s"] = sd_of(runtimes);
    r.tables.push_back(std::move(t));
    r.tables.push_back(std::move(hist));
  }
  return r;
}

// ------------------------------------------------------------ queue sweep

std::string delay_label(const pilot::QueueDelayModel& q) {
  std::string out(pilot::to_string(q.kind));
  if (q.kind == pilot::QueueDelayModel::Kind::lognormal) {
    return out + ":" + format_number(q.log_mu) + "/" + format_number(q.log_sigma);
  }
  return out + ":" + format_number(q.seconds);
}

MetricsReport queue_sweep_report(const QueueSweepSpec& spec) {
  MetricsReport r;
  Table summary{"queue_sweep",
                {"strategy", "queue_delay", "alerts", "cfd_runs", "completed", "mean_response_s", "max_response_s",
                 "mean_validity_s", "min_validity_s"},
                {},
                true};
  Table runs{"queue_sweep_runs",
             {"strategy", "queue_delay", "iteration", "detected_s", "pilot_active_s", "completed_s", "response_s",
              "validity_s"},
             {},
             false};
  std::map<std::string, std::map<pilot::Strategy, double>> means;
  for (const auto& q : spec.queue_delays) {
    for (auto s : spec.strategies) {
      auto cfg = spec.base;
      cfg.system.queue_delay = q;
      cfg.controller.strategy = s;
      const auto res = pipeline::run_cups(cfg);
      const std::string label = delay_label(q);
      const std::string strat(pilot::to_string(s));
      collect_violations(res, r.violations, strat + "/" + label + ": ");
      const auto pt = pilot_times(res.audit);
      std::vector<double> response, validity;
      std::size_t completed = 0;
      for (const auto& run : res.runs) {
        Cell active = std::monostate{}, done = std::monostate{}, resp = std::monostate{}, val = std::monostate{};
        if (run.task.pilot) {
          if (auto it = pt.active.find(*run.task.pilot); it != pt.active.end()) active = to_seconds(it->second);
        }
        if (run.task.completed) {
          ++completed;
          done = to_seconds(*run.task.completed);
          response.push_back(to_seconds(*run.task.completed - run.detected_at));
          resp = response.back();
        }
        if (run.validity) {
          validity.push_back(to_seconds(*run.validity));
          val = validity.back();
        }
        runs.add({strat, label, as_int(run.iteration), to_seconds(run.detected_at), active, done, resp, val});
      }
      auto opt_min = [](const std::vector<double>& xs) -> Cell {
        if (xs.empty()) return std::monostate{};
        return *std::min_element(xs.begin(), xs.end());
      };
      auto opt_max = [](const std::vector<double>& xs) -> Cell {
        if (xs.empty()) return std::monostate{};
        return *std::max_element(xs.begin(), xs.end());
      };
      auto opt_mean = [](const std::vector<double>& xs) -> Cell {
        if (xs.empty()) return std::monostate{};
        return mean_of(xs);
      };
      summary.add({strat, label, as_int(res.alerts()), as_int(res.runs.size()), as_int(completed),
                   opt_mean(response), opt_max(response), opt_mean(validity), opt_min(validity)});
      if (!response.empty()) {
        means[label][s] = mean_of(response);
        r.summary["mean_response_s/" + strat + "/" + label] = mean_of(response);
      }
      r.summary["alerts/" + strat + "/" + label] = static_cast<double>(res.alerts());
    }
  }
  for (const auto& [label, by] : means) {
    auto p = by.find(pilot::Strategy::proactive);
    auto re = by.find(pilot::Strategy::reactive);
    if (p != by.end() && re != by.end()) r.summary["proactive_speedup_s/" + label] = re->second - p->second;
  }
  r.tables = {std::move(summary), std::move(runs)};
  return r;
}

}  // namespace

std::vector<PathLatency> measure_paths(const LatencySpec& spec, std::uint64_t seed) {
  netsim::Simulator sim(seed);
  netsim::Network net(sim);
  for (const auto& n : spec.nodes) net.add_node(n.id, {n.ue_efficiency});
  for (const auto& l : spec.links) net.add_link(l);

  transport::ClientOptions options;
  options.size_cache = spec.size_cache;
  options.connection_setup = spec.connection_setup;
  std::map<netsim::NodeId, std::unique_ptr<logstore::LogStore>> stores;
  std::map<netsim::NodeId, std::unique_ptr<transport::LogServer>> servers;
  std::map<netsim::NodeId, std::unique_ptr<transport::SimEndpoint>> endpoints;
  for (const auto& n : spec.nodes) endpoints[n.id] = std::make_unique<transport::SimEndpoint>(net, n.id, options);
  for (const auto& p : spec.paths) {
    if (stores.count(p.to)) continue;
    stores[p.to] = std::make_unique<logstore::LogStore>(std::make_shared<logstore::MemoryBackend>());
    servers[p.to] = std::make_unique<transport::LogServer>(*stores[p.to], [&sim] { return sim.now(); });
    endpoints[p.to]->set_server(servers[p.to].get());
  }

  std::vector<PathLatency> out;
  for (std::size_t i = 0; i < spec.paths.size(); ++i) {
    const auto& p = spec.paths[i];
    const std::string log = "bench/" + std::to_string(i);
    auto& target = stores[p.to]->create_log(log, spec.payload_bytes, static_cast<std::uint64_t>(spec.messages));
    auto stats = transport::measure_latency(endpoints[p.from]->client(), p.to, log, spec.payload_bytes, spec.messages);
    if (target.next_seq() != static_cast<logstore::Seq>(spec.messages) + 1) {
      throw Error(Errc::storage_failure, p.name + ": target log holds " + std::to_string(target.next_seq() - 1) +
                                             " entries after " + std::to_string(spec.messages) + " appends");
    }
    out.push_back({p, std::move(stats)});
  }
  return out;
}

std::vector<SlicePoint> slicing_curve(const SlicingSpec& spec, std::uint64_t seed) {
  netsim::Simulator sim(seed);
  netsim::Network net(sim, spec.noise);
  net.add_node(spec.gnb);
  for (const auto& ue : spec.ues) {
    net.add_node(ue.id, {ue.ue_efficiency});
    netsim::LinkSpec radio;
    radio.a = ue.id;
    radio.b = spec.gnb;
    radio.latency_mean_ms = spec.latency_mean_ms;
    radio.capacity_mbps = spec.base_capacity_mbps;
    net.add_link(radio);
  }
  std::vector<SlicePoint> out;
  for (int k = 1; k <= 9; ++k) {
    SlicePoint pt;
    pt.k = k;
    const netsim::SliceConfig low{10 - k, (10 - k) / 10.0, spec.ues[0].id};
    const netsim::SliceConfig high{k, k / 10.0, spec.ues[1].id};
    auto trials = net.run_throughput_trials({{low.assigned_ue, low}, {high.assigned_ue, high}},
                                            from_seconds(spec.interval_s), spec.samples);
    auto fill = [&](SlicePoint::Ue& ue, const netsim::SliceConfig& slice, std::vector<netsim::TransferRecord> recs) {
      ue.id = slice.assigned_ue;
      ue.fraction = slice.prb_fraction;
      ue.model_mbps = net.slice_capacity_mean(ue.id, slice);
      ue.records = std::move(recs);
      for (const auto& r : ue.records) ue.mbps.push_back(r.achieved_mbps());
      ue.mean_mbps = mean_of(ue.mbps);
      ue.sd_mbps = sd_of(ue.mbps);
    };
    fill(pt.low, low, std::move(trials[0]));
    fill(pt.high, high, std::move(trials[1]));
    out.push_back(std::move(pt));
  }
  return out;
}

SustainedRun sustained_throughput(const pipeline::CupsConfig& config, int tasks) {
  netsim::Simulator sim(config.seed);
  auto system = config.system;
  system.queue_delay = {};
  pilot::BatchFacility facility(sim, system);
  auto options = config.controller;
  options.strategy = pilot::Strategy::proactive;
  pilot::PilotController ctl(facility, config.cost, options);
  ctl.start();
  sim.advance(SimTime{0});
  std::size_t done = 0;
  ctl.on_complete([&](const pilot::TaskRecord&) { ++done; });
  for (int i = 0; i < tasks; ++i) ctl.submit_task(config.task, SimTime{0}, "sustained/" + std::to_string(i));
  const auto n = static_cast<std::size_t>(tasks);
  sim.run_until([&] { return done == n; }, SimTime{from_seconds(30 * 24 * 3600.0)});

  SustainedRun out;
  for (const auto& t : ctl.tasks()) {
    if (t.completed) out.tasks.push_back(t);
  }
  std::sort(out.tasks.begin(), out.tasks.end(),
            [](const pilot::TaskRecord& a, const pilot::TaskRecord& b) { return *a.completed < *b.completed; });
  if (!out.tasks.empty()) {
    SimTime first = *out.tasks.front().started;
    for (const auto& t : out.tasks) first = std::min(first, *t.started);
    out.interval_s = to_seconds(*out.tasks.back().completed - first) / static_cast<double>(out.tasks.size());
  }
  return out;
}

MetricsReport run_scenario(const ScenarioConfig& config) {
  MetricsReport r = std::visit(
      [&](const auto& spec) -> MetricsReport {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, LatencySpec>) return latency_report(spec, config.seed);
        if constexpr (std::is_same_v<T, SlicingSpec>) return slicing_report(spec, config.seed);
        if constexpr (std::is_same_v<T, CupsSpec>) return cups_report(spec);
        if constexpr (std::is_same_v<T, QueueSweepSpec>) return queue_sweep_report(spec);
      },
      config.spec);
  r.scenario = config.name;
  r.kind = config.kind();
  r.seed = config.seed;
  r.completed = true;
  return r;
}

bool SweepResult::ok() const {
  return std::all_of(reports.begin(), reports.end(), [](const MetricsReport& r) { return r.ok(); });
}

Table SweepResult::per_seed() const {
  std::set<std::string> keys;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.summary) keys.insert(k);
  }
  Table t{"sweep", {"seed", "ok"}, {}, true};
  t.columns.insert(t.columns.end(), keys.begin(), keys.end());
  for (const auto& r : reports) {
    std::vector<Cell> row{as_int(r.seed), std::int64_t{r.ok()}};
    for (const auto& k : keys) {
      auto it = r.summary.find(k);
      row.push_back(it == r.summary.end() ? Cell{std::monostate{}} : Cell{it->second});
    }
    t.add(std::move(row));
  }
  return t;
}

Table SweepResult::across_seeds() const {
  std::map<std::string, std::vector<double>> values;
  for (const auto& r : reports) {
    for (const auto& [k, v] : r.summary) values[k].push_back(v);
  }
  Table t{"sweep_stats", {"metric", "n", "mean", "sd", "min", "max"}, {}, true};
  for (const auto& [k, xs] : values) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    t.add({k, as_int(xs.size()), mean_of(xs), sd_of(xs), *lo, *hi});
  }
  return t;
}

std::pair<std::uint64_t, std::uint64_t> parse_seed_range(std::string_view text) {
  auto bad = [&] { return Error(Errc::config_error, "--seeds: expected A..B with A <= B, got '" + std::string(text) + "'"); };
  const auto dots = text.find("..");
  if (dots == std::string_view::npos) throw bad();
  auto num = [&](std::string_view s) {
    std::uint64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) throw bad();
    return v;
  };
  const auto a = num(text.substr(0, dots));
  const auto b = num(text.substr(dots + 2));
  if (a > b) throw bad();
  return {a, b};
}

SweepResult run_sweep(const ScenarioConfig& config, std::uint64_t first, std::uint64_t last, unsigned jobs) {
  if (first > last) throw Error(Errc::invalid_argument, "empty seed range");
  const std::size_t count = static_cast<std::size_t>(last - first) + 1;
  if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, count));

  SweepResult out;
  out.reports.resize(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        auto cfg = config;
        cfg.set_seed(first + i);
        out.reports[i] = run_scenario(cfg);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir) {
  for (const auto& r : sweep.reports) write_report(r, dir / ("seed-" + std::to_string(r.seed)));
  std::filesystem::create_directories(dir);
  for (const auto& t : {sweep.per_seed(), sweep.across_seeds()}) {
    std::ofstream out(dir / (t.name + ".csv"), std::ios::binary | std::ios::trunc);
    out << to_csv(t);
    if (!out) throw Error(Errc::storage_failure, (dir / (t.name + ".csv")).string() + ": write failed");
  }
}

}  // namespace fabric::scenario
