/*
 * tests/test_netsim.cpp
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

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "fabric/common/error.hpp"
#include "fabric/netsim/network.hpp"

using namespace fabric;
using namespace fabric::netsim;

namespace {

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sd_of(const std::vector<double>& xs) {
  const double m = mean_of(xs);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::vector<double> mbps(const std::vector<TransferRecord>& rs) {
  std::vector<double> out;
  for (const auto& r : rs) out.push_back(r.achieved_mbps());
  return out;
}

// The six published means of the two-UE slicing sweep.
std::map<NodeId, std::vector<std::pair<double, double>>> published_points() {
  return {{"rpi1", {{0.1, 4.95}, {0.5, 23.91}, {0.9, 34.73}}},
          {"rpi2", {{0.1, 5.14}, {0.5, 25.22}, {0.9, 43.47}}}};
}

struct RadioCell {
  Simulator sim;
  Network net;
  explicit RadioCell(std::uint64_t seed) : sim(seed), net(sim) {
    const auto fit = fit_ue_efficiency(published_points());
    net.add_node("gnb");
    net.add_node("rpi1", {fit.efficiency.at("rpi1")});
    net.add_node("rpi2", {fit.efficiency.at("rpi2")});
    net.add_link({.a = "rpi1", .b = "gnb", .latency_mean_ms = 20, .capacity_mbps = fit.base_capacity_mbps});
    net.add_link({.a = "rpi2", .b = "gnb", .latency_mean_ms = 20, .capacity_mbps = fit.base_capacity_mbps});
  }
};

SliceConfig slice_of(int k, const NodeId& ue) { return {k, k / 10.0, ue}; }

}  // namespace

TEST_CASE("advance on an empty queue moves the clock only") {
  Simulator sim;
  auto fired = sim.advance(from_ms(250));
  CHECK(fired.empty());
  CHECK(sim.now() == from_ms(250));
}

TEST_CASE("events at the same timestamp fire in enqueue order") {
  Simulator sim;
  std::vector<int> order;
  for (int i = 0; i < 5; ++i) sim.schedule_at(from_ms(10), "tick", [&, i] { order.push_back(i); });
  sim.schedule_at(from_ms(5), "early", [&] { order.push_back(-1); });
  auto fired = sim.advance(from_ms(10));
  CHECK(order == std::vector<int>{-1, 0, 1, 2, 3, 4});
  CHECK(fired.size() == 6);
}

TEST_CASE("cancelled events never fire") {
  Simulator sim;
  int hits = 0;
  auto id = sim.schedule_after(from_ms(1), "x", [&] { ++hits; });
  sim.schedule_after(from_ms(2), "y", [&] { ++hits; });
  CHECK(sim.cancel(id));
  CHECK_FALSE(sim.cancel(id));
  CHECK(sim.pending() == 1);
  sim.advance(from_ms(5));
  CHECK(hits == 1);
}

TEST_CASE("seeded runs produce identical traces") {
  auto run = [](std::uint64_t seed) {
    Simulator sim(seed);
    sim.set_tracing(true);
    Network net(sim);
    net.add_node("a");
    net.add_node("b");
    net.add_node("c");
    net.add_link({.a = "a", .b = "b", .latency_mean_ms = 5, .latency_sd_ms = 2, .loss_prob = 0.2,
                  .dup_prob = 0.1, .reorder_jitter_ms = 3});
    net.add_link({.a = "b", .b = "c", .latency_mean_ms = 7, .latency_sd_ms = 1});
    int got = 0;
    net.set_receiver("c", [&](const NodeId&, Bytes) { ++got; });
    for (int i = 0; i < 200; ++i) {
      sim.schedule_after(from_ms(i), "tx", [&net, i] { net.send("a", "c", Bytes(32, static_cast<std::uint8_t>(i))); });
    }
    sim.advance(from_seconds(10));
    return std::make_pair(sim.trace_hash(), sim.trace_jsonl());
  };
  const auto a = run(7);
  const auto b = run(7);
  const auto c = run(8);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(a.first != c.first);
}

TEST_CASE("named streams are independent of each other and reproducible") {
  Simulator sim(3);
  auto s1 = sim.stream("alpha");
  auto s2 = sim.stream("alpha");
  auto s3 = sim.stream("beta");
  const auto x = s1();
  CHECK(x == s2());
  CHECK(x != s3());
}

TEST_CASE("frames sent inside a partition window are dropped") {
  Simulator sim;
  Network net(sim);
  net.add_node("a");
  net.add_node("b");
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 1,
                .partitions = {Interval{from_seconds(1), from_seconds(2)}}});
  int got = 0;
  net.set_receiver("b", [&](const NodeId&, Bytes) { ++got; });
  CHECK_FALSE(net.send("a", "b", Bytes{1}).dropped);
  sim.advance(from_seconds(1.5));
  auto r = net.send("a", "b", Bytes{2});
  CHECK(r.dropped);
  CHECK(r.reason == "partition");
  sim.advance(from_seconds(2));
  CHECK_FALSE(net.send("a", "b", Bytes{3}).dropped);
  sim.advance(from_seconds(3));
  CHECK(got == 2);
}

TEST_CASE("a down receiver drops arriving frames") {
  Simulator sim;
  Network net(sim);
  net.add_node("a");
  net.add_node("b");
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 1});
  int got = 0;
  net.set_receiver("b", [&](const NodeId&, Bytes) { ++got; });
  net.set_up("b", false);
  net.send("a", "b", Bytes{1});
  sim.advance(from_ms(10));
  CHECK(got == 0);
  CHECK(net.stats().frames_dropped == 1);
}

TEST_CASE("serialization delay follows bytes*8 over the slice capacity") {
  Simulator sim;
  Network net(sim);
  net.add_node("ue");
  net.add_node("gnb");
  net.add_link({.a = "ue", .b = "gnb", .capacity_mbps = 48.0});
  const SliceConfig half{5, 0.5, "ue"};
  const auto r = net.deliver(5'000'000, *net.find_link("ue", "gnb"), &half, SimTime{0});
  const double expected = 5'000'000 * 8.0 / (0.5 * 48.0 * 1e6);
  CHECK(expected == doctest::Approx(1.6667).epsilon(1e-3));
  CHECK(to_seconds(r.serialization) == doctest::Approx(expected).epsilon(1e-6));
  CHECK(r.latency == kMinLatency);
}

TEST_CASE("wired hop latency centres on its configured mean") {
  Simulator sim(11);
  Network net(sim);
  net.add_node("a");
  net.add_node("b");
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 17, .latency_sd_ms = 0.8});
  std::vector<double> ms;
  for (int i = 0; i < 2000; ++i) {
    ms.push_back(to_ms(net.deliver(16, *net.find_link("a", "b"), nullptr, SimTime{0}).arrival));
  }
  CHECK(mean_of(ms) == doctest::Approx(17.0).epsilon(0.01));
  CHECK(sd_of(ms) == doctest::Approx(0.8).epsilon(0.1));
}

TEST_CASE("latency never falls below the floor") {
  Simulator sim(5);
  Network net(sim);
  net.add_node("a");
  net.add_node("b");
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 0.05, .latency_sd_ms = 1.0});
  for (int i = 0; i < 500; ++i) {
    CHECK(net.deliver(1, *net.find_link("a", "b"), nullptr, SimTime{0}).latency >= kMinLatency);
  }
}

TEST_CASE("multi-hop routing takes the fewest hops") {
  Simulator sim;
  Network net(sim);
  for (auto n : {"a", "b", "c", "d"}) net.add_node(n);
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 1});
  net.add_link({.a = "b", .b = "c", .latency_mean_ms = 1});
  net.add_link({.a = "c", .b = "d", .latency_mean_ms = 1});
  net.add_link({.a = "a", .b = "d", .latency_mean_ms = 10});
  SimTime at{0};
  net.set_receiver("d", [&](const NodeId&, Bytes) { at = sim.now(); });
  net.send("a", "d", Bytes{1});
  sim.advance(from_seconds(1));
  CHECK(at == from_ms(10));
  net.add_node("island");
  CHECK_FALSE(net.reachable("a", "island"));
  try {
    net.send("a", "island", Bytes{1});
    FAIL("expected route-unreachable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::route_unreachable);
  }
}

TEST_CASE("directed links carry frames one way only") {
  Simulator sim;
  Network net(sim);
  net.add_node("a");
  net.add_node("b");
  net.add_link({.a = "a", .b = "b", .latency_mean_ms = 1, .directed = true});
  CHECK(net.reachable("a", "b"));
  CHECK_FALSE(net.reachable("b", "a"));
}

TEST_CASE("slice validation") {
  CHECK_THROWS_AS(validate_slice({0, 0.1, "u"}), Error);
  CHECK_THROWS_AS(validate_slice({10, 0.1, "u"}), Error);
  CHECK_THROWS_AS(validate_slice({1, 0.0, "u"}), Error);
  CHECK_THROWS_AS(validate_slice({1, 1.5, "u"}), Error);
  CHECK_NOTHROW(validate_slice({9, 1.0, "u"}));

  RadioCell cell(1);
  cell.net.add_slice("rpi1", "gnb", {7, 0.7, "rpi1"});
  CHECK_THROWS_AS(cell.net.add_slice("rpi1", "gnb", {4, 0.4, "gnb"}), Error);
  CHECK_THROWS_AS(cell.net.run_throughput_trials({{"rpi1", slice_of(6, "rpi1")}, {"rpi1", slice_of(6, "rpi1")}},
                                                 from_seconds(1), 1),
                  Error);
}

TEST_CASE("effective capacity matches the published anchors") {
  CHECK(mean_slice_capacity(48.3, {1, 0.1, "u"}, 1.0) == doctest::Approx(4.95).epsilon(0.05));

  const auto fit = fit_ue_efficiency(published_points());
  // Closed form: slope = sum(f*y) / sum(f^2) with sum(f^2) = 1.07.
  CHECK(fit.base_capacity_mbps == doctest::Approx((0.514 + 12.61 + 39.123) / 1.07));
  CHECK(fit.efficiency.at("rpi2") == 1.0);
  CHECK(fit.efficiency.at("rpi1") ==
        doctest::Approx((0.495 + 11.955 + 31.257) / (0.514 + 12.61 + 39.123)));
  const double base = fit.base_capacity_mbps;
  CHECK(mean_slice_capacity(base, {9, 0.9, "rpi2"}, 1.0) == doctest::Approx(43.47).epsilon(0.05));
  CHECK(mean_slice_capacity(base, {5, 0.5, "rpi1"}, fit.efficiency.at("rpi1")) ==
        doctest::Approx(23.91).epsilon(0.15));
  CHECK(mean_slice_capacity(base, {5, 0.5, "rpi2"}, 1.0) == doctest::Approx(25.22).epsilon(0.15));
}

TEST_CASE("bounded noise has the configured moments and stays non-negative") {
  std::mt19937_64 rng(9);
  for (double mean : {4.0, 24.0, 44.0}) {
    std::vector<double> xs;
    for (int i = 0; i < 20000; ++i) xs.push_back(sample_bounded(mean, 4.0, 3.0, rng));
    CHECK(*std::min_element(xs.begin(), xs.end()) >= 0.0);
    CHECK(*std::max_element(xs.begin(), xs.end()) <= mean + 12.0);
    CHECK(mean_of(xs) == doctest::Approx(mean).epsilon(0.01));
    CHECK(sd_of(xs) == doctest::Approx(4.0).epsilon(0.03));
  }
}

TEST_CASE("trial sample mean sits within two standard errors of the model") {
  RadioCell cell(21);
  const auto slice = slice_of(5, "rpi2");
  const auto records = cell.net.run_throughput_trial("rpi2", slice, from_seconds(1), 100);
  REQUIRE(records.size() == 100);
  for (const auto& r : records) {
    CHECK(r.end - r.start == from_seconds(1));
    CHECK(r.achieved_mbps() == doctest::Approx(r.bytes * 8.0 / 1e6).epsilon(1e-12));
  }
  const double model = cell.net.slice_capacity_mean("rpi2", slice);
  CHECK(std::abs(mean_of(mbps(records)) - model) <= 2.0 * 4.0 / std::sqrt(100.0));
}

TEST_CASE("degenerate trials are rejected") {
  RadioCell cell(1);
  CHECK_THROWS_AS(cell.net.run_throughput_trial("rpi1", slice_of(5, "rpi1"), Duration{0}, 10), Error);
  CHECK_THROWS_AS(cell.net.run_throughput_trial("rpi1", slice_of(5, "rpi1"), from_seconds(1), 0), Error);
  try {
    cell.net.run_throughput_trial("gnb", slice_of(5, "gnb"), from_seconds(1), 1);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::invalid_slice);
  }
  try {
    cell.net.run_throughput_trial("nobody", slice_of(5, "nobody"), from_seconds(1), 1);
    FAIL("expected route-unreachable");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::route_unreachable);
  }
}

TEST_CASE("complementary concurrent slices order by fraction and conserve capacity") {
  RadioCell cell(4);
  auto out = cell.net.run_throughput_trials(
      {{"rpi1", slice_of(3, "rpi1")}, {"rpi2", slice_of(7, "rpi2")}}, from_seconds(1), 100);
  CHECK(mean_of(mbps(out[0])) < mean_of(mbps(out[1])));
  const auto fit = fit_ue_efficiency(published_points());
  const double sum = cell.net.slice_capacity_mean("rpi1", slice_of(3, "rpi1")) +
                     cell.net.slice_capacity_mean("rpi2", slice_of(7, "rpi2"));
  CHECK(sum <= fit.base_capacity_mbps * 1.0 + 1e-9);
}

TEST_CASE("seed-averaged curve is monotone and proportional") {
  std::vector<double> curve(10, 0.0);
  const int seeds = 10;
  for (int seed = 1; seed <= seeds; ++seed) {
    RadioCell cell(static_cast<std::uint64_t>(seed));
    for (int k = 1; k <= 9; ++k) {
      auto out = cell.net.run_throughput_trials(
          {{"rpi1", slice_of(10 - k, "rpi1")}, {"rpi2", slice_of(k, "rpi2")}}, from_seconds(1), 100);
      curve[static_cast<std::size_t>(k)] += mean_of(mbps(out[1])) / seeds;
    }
  }
  for (int k = 2; k <= 9; ++k) CHECK(curve[static_cast<std::size_t>(k)] > curve[static_cast<std::size_t>(k - 1)]);
  for (int k = 1; k <= 9; ++k) {
    const double ratio = curve[static_cast<std::size_t>(k)] / curve[5];
    CHECK(ratio == doctest::Approx(k / 5.0).epsilon(0.15));
  }
}
