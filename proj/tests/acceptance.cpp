/*
 * tests/acceptance.cpp
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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fabric/common/error.hpp"
#include "fabric/logstore/log_store.hpp"
#include "fabric/pilot/allocation.hpp"
#include "fabric/pipeline/cups.hpp"
#include "fabric/scenario/runner.hpp"
#include "fabric/transport/client.hpp"
#include "support/window_oracle.hpp"

using namespace fabric;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = FABRIC_SCENARIO_DIR;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << why << "]";
    }
  }
};

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

template <typename F>
void parallel_for(std::size_t n, F&& fn) {
  std::atomic<std::size_t> next{0};
  const unsigned jobs = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
  std::vector<std::thread> pool;
  for (unsigned j = 0; j < jobs; ++j) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

scenario::PathLatency find_path(const std::vector<scenario::PathLatency>& paths, const std::string& name) {
  for (const auto& p : paths) {
    if (p.path.name == name) return p;
  }
  throw Error(Errc::invalid_argument, "no path " + name);
}

// 1. Exactly-once delivery under loss, duplication and reordering.
Verdict exactly_once() {
  Verdict v;
  const auto wall_start = std::chrono::steady_clock::now();
  netsim::Simulator sim(2024);
  netsim::Network net(sim);
  net.add_node("client");
  net.add_node("server");
  for (auto [a, b] : {std::pair{"client", "server"}, std::pair{"server", "client"}}) {
    netsim::LinkSpec l;
    l.a = a;
    l.b = b;
    l.directed = true;
    l.latency_mean_ms = 10;
    l.latency_sd_ms = 3;
    l.loss_prob = 0.2;
    l.dup_prob = 0.1;
    l.reorder_jitter_ms = 20;
    net.add_link(l);
  }
  logstore::LogStore store(std::make_shared<logstore::MemoryBackend>());
  transport::LogServer server(store, [&sim] { return sim.now(); });
  transport::ClientOptions options;
  options.connection_setup = false;
  transport::SimEndpoint client_ep(net, "client", options);
  transport::SimEndpoint server_ep(net, "server");
  server_ep.set_server(&server);
  auto& log = store.create_log("target", 16, 10000);

  const int n = 10000;
  int done = 0, failed = 0;
  std::map<MessageId, logstore::Seq> returned;
  for (int i = 0; i < n; ++i) {
    const auto id = MessageIdBuilder().add("acceptance/eo").add(static_cast<std::uint64_t>(i)).finish();
    sim.schedule_at(from_ms(i), "send", [&, id, i] {
      Bytes payload(8);
      store_u64(payload, 0, static_cast<std::uint64_t>(i));
      client_ep.client().remote_append("server", "target", id, payload, [&, id](const transport::AppendOutcome& o) {
        if (o.ok()) {
          returned[id] = o.seq;
        } else {
          ++failed;
        }
        ++done;
      });
    });
  }
  sim.run_until([&] { return done == n; }, SimTime{from_seconds(24 * 3600.0)});
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();

  const auto scan = log.scan(1, n);
  std::set<MessageId> seen;
  bool gap_free = scan.entries.size() == static_cast<std::size_t>(n);
  bool seq_match = true;
  for (std::size_t i = 0; i < scan.entries.size(); ++i) {
    const auto& e = scan.entries[i];
    if (e.seq != i + 1) gap_free = false;
    seen.insert(e.message_id);
    auto it = returned.find(e.message_id);
    if (it == returned.end() || it->second != e.seq) seq_match = false;
  }
  v.detail << n << " appends, " << seen.size() << " distinct ids stored, next_seq " << log.next_seq() << ", "
           << client_ep.client().stats().retransmissions << " retransmissions, " << server.stats().duplicates
           << " duplicates absorbed, simulated " << fixed(to_seconds(sim.now()), 1) << " s, wall " << fixed(wall, 2)
           << " s";
  v.require(done == n && failed == 0, "not every append completed");
  v.require(seen.size() == static_cast<std::size_t>(n), "an id is missing or stored twice");
  v.require(gap_free && log.next_seq() == static_cast<logstore::Seq>(n) + 1, "seqs are not 1..10000");
  v.require(seq_match, "a returned seq differs from the stored one");
  v.require(wall < 60.0, "took 60 s or more");
  return v;
}

// 2. Path latencies.
Verdict path_latency() {
  Verdict v;
  const auto cfg = scenario::load_scenario(kScenarios / "path_latency.json");
  const auto paths = scenario::measure_paths(std::get<scenario::LatencySpec>(cfg.spec), cfg.seed);
  const std::vector<std::tuple<std::string, double, double>> want{
      {"UNL->UCSB (5G+Int.)", 101, 17}, {"UNL->UCSB (Internet)", 17, 0.8}, {"UCSB->ND (Internet)", 92, 1}};
  for (const auto& [name, mean, sd] : want) {
    const auto p = find_path(paths, name);
    v.detail << name << " " << fixed(p.stats.mean_ms) << "+-" << fixed(p.stats.sd_ms) << " ms (n=" << p.stats.n
             << "); ";
    v.require(p.stats.n == 29, name + " kept " + std::to_string(p.stats.n) + " samples");
    v.require(std::abs(p.stats.mean_ms - mean) <= 2 * sd, name + " mean outside +-2 SD");
    v.require(std::abs(p.stats.sd_ms - sd) <= 0.3 * sd, name + " SD outside +-30 %");
  }
  return v;
}

// 3. Size cache halves wired latency; a stale size fails cleanly.
Verdict cache_halving() {
  Verdict v;
  const auto cfg = scenario::load_scenario(kScenarios / "path_latency.json");
  auto spec = std::get<scenario::LatencySpec>(cfg.spec);
  const std::string wired = "UNL->UCSB (Internet)";
  std::erase_if(spec.paths, [&](const scenario::PathDecl& p) { return p.name != wired; });
  spec.size_cache = false;
  const auto uncached = scenario::measure_paths(spec, cfg.seed).front().stats;
  spec.size_cache = true;
  const auto cached = scenario::measure_paths(spec, cfg.seed).front().stats;
  const double ratio = cached.mean_ms / uncached.mean_ms;
  v.detail << "wired path uncached " << fixed(uncached.mean_ms) << " ms, cached " << fixed(cached.mean_ms)
           << " ms, ratio " << fixed(ratio, 3);
  v.require(std::abs(ratio - 0.5) <= 0.05, "ratio outside 0.5 +- 10 %");

  // Server-side element size change behind a warm cache.
  netsim::Simulator sim(3);
  netsim::Network net(sim);
  net.add_node("c");
  net.add_node("s");
  netsim::LinkSpec l;
  l.a = "c";
  l.b = "s";
  l.latency_mean_ms = 4.25;
  l.latency_sd_ms = 0.4;
  net.add_link(l);
  logstore::LogStore store(std::make_shared<logstore::MemoryBackend>());
  transport::LogServer server(store, [&sim] { return sim.now(); });
  transport::ClientOptions o;
  o.size_cache = true;
  transport::SimEndpoint c(net, "c", o);
  transport::SimEndpoint s(net, "s");
  s.set_server(&server);
  auto& log = store.create_log("l", 64, 16);
  const auto id = [](int i) { return MessageIdBuilder().add("acceptance/cache").add(static_cast<std::uint64_t>(i)).finish(); };
  bool warm = true;
  for (int i = 1; i <= 3; ++i) warm = warm && c.client().append_sync("s", "l", id(i), Bytes(64, static_cast<std::uint8_t>(i))).ok();
  log.resize(128);
  const auto stale = c.client().append_sync("s", "l", id(4), Bytes(64, 4));
  bool intact = log.next_seq() == 4;
  for (int i = 1; i <= 3 && intact; ++i) intact = log.read(static_cast<logstore::Seq>(i)).payload == Bytes(64, static_cast<std::uint8_t>(i));
  const auto retry = c.client().append_sync("s", "l", id(4), Bytes(64, 4));
  v.detail << "; after resize: " << (stale.error ? std::string(to_string(*stale.error)) : "ok") << ", log "
           << (intact ? "intact" : "CHANGED") << ", retry seq " << retry.seq;
  v.require(warm, "warm-up appends failed");
  v.require(stale.error == Errc::size_mismatch, "stale cache did not yield size-mismatch");
  v.require(intact, "log contents changed by the rejected append");
  v.require(retry.ok() && retry.seq == 4 && log.read(4).payload == Bytes(64, 4), "retry after refresh failed");
  return v;
}

// 4. Slicing curve.
Verdict slicing() {
  Verdict v;
  const auto cfg = scenario::load_scenario(kScenarios / "slicing.json");
  const auto curve = scenario::slicing_curve(std::get<scenario::SlicingSpec>(cfg.spec), cfg.seed);
  std::vector<double> per_fraction;
  bool monotone = true;
  double sd_lo = INFINITY, sd_hi = 0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const auto& h = curve[i].high;
    per_fraction.push_back(h.mean_mbps / h.fraction);
    if (i > 0 && h.mean_mbps <= curve[i - 1].high.mean_mbps) monotone = false;
    for (const auto* ue : {&curve[i].low, &curve[i].high}) {
      sd_lo = std::min(sd_lo, ue->sd_mbps);
      sd_hi = std::max(sd_hi, ue->sd_mbps);
    }
  }
  const double pf = mean_of(per_fraction);
  double worst = 0;
  for (double x : per_fraction) worst = std::max(worst, std::abs(x / pf - 1));
  const double a10 = curve.front().high.mean_mbps, a90 = curve.back().high.mean_mbps;
  v.detail << curve.size() << " configs, " << (monotone ? "monotone" : "NOT monotone") << ", mean/f "
           << fixed(pf) << " Mbps (max deviation " << fixed(100 * worst, 1) << " %), 10 %: " << fixed(a10)
           << " Mbps, 90 %: " << fixed(a90) << " Mbps, SD range " << fixed(sd_lo) << ".." << fixed(sd_hi) << " Mbps";
  v.require(curve.size() == 9, "expected nine configurations");
  v.require(monotone, "throughput not monotone in fraction");
  v.require(worst <= 0.15, "mean(f)/f varies by more than 15 %");
  v.require(std::abs(a10 / 4.95 - 1) <= 0.05, "10 % anchor off by more than 5 %");
  v.require(std::abs(a90 / 43.47 - 1) <= 0.05, "90 % anchor off by more than 5 %");
  v.require(sd_lo >= 3.0 && sd_hi <= 5.0, "a per-config SD is outside 3..5 Mbps");
  return v;
}

// 5. Allocation equations, exhaustively.
Verdict pilot_logic() {
  Verdict v;
  std::size_t checked = 0, wrong = 0;
  for (std::uint32_t req = 0; req <= 16; ++req) {
    for (std::uint32_t avail = 0; avail <= 16; ++avail) {
      const auto want = avail >= req ? pilot::Decision::no : pilot::Decision::yes;
      ++checked;
      if (pilot::decide_submit(req, avail) != want) ++wrong;
    }
  }
  for (std::uint64_t threshold = 1; threshold <= 16; ++threshold) {
    for (std::uint64_t d = 0; d <= 16 * threshold; ++d) {
      const auto want = static_cast<std::uint32_t>(std::max<std::uint64_t>(1, (d + threshold - 1) / threshold));
      ++checked;
      if (pilot::required_nodes(d, threshold) != want) ++wrong;
    }
  }
  for (std::uint32_t req = 0; req <= 16; ++req) {
    for (std::uint32_t total = 1; total <= 16; ++total) {
      for (double est : {60.0, 420.39, 3600.0, 48 * 3600.0, 72 * 3600.0}) {
        for (double max_rt : {300.0, 3600.0, 48 * 3600.0}) {
          pilot::SystemSpec sys;
          sys.total_nodes = total;
          sys.max_runtime = from_seconds(max_rt);
          pilot::TaskSpec task;
          task.estimated_runtime = from_seconds(est);
          const auto p = pilot::pilot_parameters(req, task, sys);
          ++checked;
          if (p.nodes != std::min(total, req) || p.runtime != std::min(sys.max_runtime, task.estimated_runtime)) {
            ++wrong;
          }
        }
      }
    }
  }
  std::vector<pilot::PilotSpec> pilots(2);
  pilots[0].nodes = 4;
  pilots[0].state = pilot::PilotState::active;
  pilots[0].activate_time = SimTime{0};
  pilots[1].nodes = 8;
  pilots[1].state = pilot::PilotState::queued;
  const bool active_sum = pilot::available_nodes(pilots, from_seconds(1)) == 4 &&
                   pilot::available_nodes(std::span<const pilot::PilotSpec>{}, SimTime{0}) == 0;
  v.detail << checked << " grid and clamp cases, " << wrong << " mismatches; available_nodes counts active pilots only: "
           << (active_sum ? "ok" : "WRONG");
  v.require(wrong == 0, "a case disagrees with the case split or clamps");
  v.require(active_sum, "available_nodes is wrong");
  return v;
}

// 6. CFD stub statistics.
Verdict cfd_stats() {
  Verdict v;
  pilot::SystemSpec sys;
  pilot::PilotSpec p;
  p.nodes = 1;
  p.state = pilot::PilotState::active;
  p.activate_time = SimTime{0};
  const auto model = pilot::CfdCostModel::standard();
  std::mt19937_64 rng(2024);
  std::vector<double> xs;
  for (int i = 0; i < 1000; ++i) {
    const auto r = pilot::execute_task(pilot::TaskSpec{}, p, sys, model, rng, SimTime{0}, SimTime{0});
    xs.push_back(to_seconds(r.runtime));
  }
  const double m = mean_of(xs), s = sd_of(xs);
  v.detail << "1000 runs on 64 cores: mean " << fixed(m) << " s, SD " << fixed(s) << " s, min "
           << fixed(*std::min_element(xs.begin(), xs.end())) << " s";
  v.require(m >= 413 && m <= 428, "mean outside [413, 428] s");
  v.require(s >= 32 && s <= 41, "SD outside [32, 41] s");
  v.require(*std::min_element(xs.begin(), xs.end()) > 0, "non-positive runtime");
  return v;
}

// 7. End-to-end timing.
Verdict end_to_end() {
  Verdict v;
  const auto cfg = scenario::load_scenario(kScenarios / "e2e_cups.json");
  const auto& spec = std::get<scenario::CupsSpec>(cfg.spec);
  const auto& c = spec.config;
  const auto r = pipeline::run_cups(c);
  const auto shift = c.weather.wind_speed.shifts.at(0).first;
  const bool zero_queue = c.system.queue_delay.kind == pilot::QueueDelayModel::Kind::constant &&
                          c.system.queue_delay.seconds == 0;
  v.require(zero_queue, "scenario queue delay is not zero");
  v.require(r.violations.empty(), "pipeline reported invariant violations");
  v.require(r.alerts() == 1, std::to_string(r.alerts()) + " alerts instead of one");
  const pipeline::Detection* alert = nullptr;
  for (const auto& d : r.detections) {
    if (d.vote) alert = &d;
  }
  if (alert) {
    const double delay = to_seconds(alert->detected_at - shift);
    v.detail << "one alert " << fixed(delay / 60.0) << " min after the shift";
    v.require(delay >= 0 && delay <= to_seconds(c.duty_cycle()), "alert not within one duty cycle of the shift");
  }
  v.require(r.runs.size() == 1 && r.runs[0].task.completed && r.runs[0].validity, "no completed CFD run");
  if (!r.runs.empty() && r.runs[0].validity) {
    const auto& run = r.runs[0];
    const double minutes = to_seconds(*run.validity) / 60.0;
    v.detail << "; CFD runtime " << fixed(to_seconds(run.task.runtime)) << " s, validity " << fixed(minutes)
             << " min (" << std::lround(minutes) << " at minute resolution)";
    v.require(std::lround(minutes) >= 23, "validity below 23 minutes");
  }
  const auto sus = scenario::sustained_throughput(c, 100);
  const double per_run_min = sus.interval_s / 60.0;
  v.detail << "; dedicated: " << sus.tasks.size() << " runs, one per " << fixed(per_run_min) << " min";
  v.require(sus.tasks.size() == 100, "sustained run incomplete");
  v.require(std::abs(per_run_min / 7.0 - 1) <= 0.05, "sustained interval not within 7 min +- 5 %");

  // Context only, not part of the verdict: validity over other runtime draws.
  std::vector<double> validity(50, 0.0);
  parallel_for(validity.size(), [&](std::size_t i) {
    auto other = c;
    other.seed = 1000 + i;
    const auto o = pipeline::run_cups(other);
    validity[i] = o.runs.empty() || !o.runs[0].validity ? NAN : to_seconds(*o.runs[0].validity) / 60.0;
  });
  const auto rounded_ok = std::count_if(validity.begin(), validity.end(), [](double m) { return std::lround(m) >= 23; });
  v.detail << "; context: seeds 1000..1049 give mean validity " << fixed(mean_of(validity)) << " min, "
           << rounded_ok << "/50 at >= 23 min";
  return v;
}

// 8. Crash-replay equivalence at every boundary.
Verdict crash_replay() {
  Verdict v;
  const auto cfg = scenario::load_scenario(kScenarios / "e2e_cups.json");
  auto c = std::get<scenario::CupsSpec>(cfg.spec).config;
  const auto clean = pipeline::run_cups(c);
  v.require(clean.violations.empty(), "fault-free run reported violations");
  const std::size_t n = clean.boundaries;
  std::vector<int> outcome(n, 0);  // 0 identical, 1 differs, 2 no crash, 3 violations
  std::mutex mu;
  std::vector<std::string> notes;
  parallel_for(n, [&](std::size_t k) {
    auto one = c;
    one.crash_at = k;
    const auto r = pipeline::run_cups(one);
    if (r.crashes != 1) {
      outcome[k] = 2;
    } else if (!r.violations.empty()) {
      outcome[k] = 3;
    } else if (r.state != clean.state) {
      outcome[k] = 1;
    }
    if (outcome[k] != 0) {
      std::lock_guard lock(mu);
      if (notes.size() < 5) notes.push_back("k=" + std::to_string(k) + " outcome " + std::to_string(outcome[k]));
    }
  });
  std::size_t logs = 0;
  for (const auto& [node, st] : clean.state) logs += st.size();
  const auto bad = static_cast<std::size_t>(std::count_if(outcome.begin(), outcome.end(), [](int o) { return o != 0; }));
  v.detail << n << " handler boundaries crashed one at a time; " << (n - bad)
           << " recovered to the fault-free state of " << logs << " logs";
  for (const auto& s : notes) v.detail << "; " << s;
  v.require(n > 0, "no boundaries observed");
  v.require(bad == 0, std::to_string(bad) + " crash points diverged");
  return v;
}

// 9. Change-detection tests against the permutation oracle.
Verdict stats_oracle() {
  Verdict v;
  const auto pairs = testing::window_pairs(testing::kWindowPairSeed, 50);
  int disagree = 0;
  std::ostringstream log;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& [cur, prev] = pairs[i];
    const auto o = testing::brute_force(cur, prev);
    const auto a = pipeline::compare_samples(cur, prev, 0.05);
    const double oracle[3] = {o.welch_p, o.mw_p, o.ks_p};
    for (int t = 0; t < 3; ++t) {
      if (a.results[t].reject != (oracle[t] < 0.05)) {
        ++disagree;
        log << "; pair " << i << " " << a.results[t].test_name << " p=" << fixed(a.results[t].p_value, 4)
            << " vs oracle " << fixed(oracle[t], 4);
      }
    }
  }
  v.detail << "50 window pairs x 3 tests at alpha 0.05: " << disagree << " disagreements" << log.str();
  v.require(disagree <= 2, "more than 2 disagreements");
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"exactly-once delivery", exactly_once},
      {"path latencies", path_latency},
      {"size cache halving", cache_halving},
      {"slicing curve", slicing},
      {"pilot decision logic", pilot_logic},
      {"CFD stub statistics", cfd_stats},
      {"end-to-end timing", end_to_end},
      {"crash-replay equivalence", crash_replay},
      {"statistical-test oracle", stats_oracle},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << "threw: " << e.what();
    }
    if (!v.pass) ++failures;
    std::cout << (v.pass ? "PASS" : "FAIL") << " criterion " << (i + 1) << " (" << criteria[i].first
              << "): " << v.detail.str() << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
