/*
 * tests/test_pipeline.cpp
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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "fabric/common/error.hpp"
#include "fabric/pipeline/cups.hpp"

#include "data/two_samples.inc"
#include "support/window_oracle.hpp"

using namespace fabric;
using namespace fabric::pipeline;
using namespace fabric::testing;

namespace {

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

Window window_of(const std::vector<double>& speeds, SimTime start) {
  Window w;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    TelemetryRecord r;
    r.timestamp = start + kCadence * static_cast<std::int64_t>(i);
    r.wind_speed = speeds[i];
    w.records.push_back(r);
  }
  return w;
}

CupsConfig shifted_scenario(std::uint64_t seed = 1) {
  CupsConfig c;
  c.seed = seed;
  c.weather.wind_speed.shifts = {{from_seconds(7200), 6.0}};
  return c;
}

}  // namespace

TEST_CASE("tests match reference values on tie-free data") {
  const std::vector<double> a{1, 2, 3, 4, 5, 6}, b{4.5, 5.5, 6.5, 7, 8, 9};
  const std::vector<double> c{2.1, 1.9, 2.4, 2.0, 2.25, 1.8}, d{2.6, 2.3, 2.9, 2.5, 2.2, 2.8};
  // a vs {4..9} reproduces scipy 1.x: t = -2.7775, p = 0.019536; KS p = 0.474026.
  const std::vector<double> b2{4, 5, 6, 7, 8, 9};
  auto t = welch_t_test(a, b2, 0.05);
  CHECK(t.statistic == doctest::Approx(-2.7774602993176547).epsilon(1e-12));
  CHECK(t.p_value == doctest::Approx(0.01953560546266314).epsilon(1e-9));
  auto k = ks_two_sample(a, b2, 0.05);
  CHECK(k.statistic == doctest::Approx(0.5));
  CHECK(k.p_value == doctest::Approx(0.474025974025974).epsilon(1e-12));
  // Tie-free: U = 3 pairs won, exact two-sided p = 14/924 (scipy: 0.0151515).
  auto u = mann_whitney_u(a, b, 0.05);
  CHECK(u.statistic == doctest::Approx(3.0));
  CHECK(u.p_value == doctest::Approx(14.0 / 924.0).epsilon(1e-12));
  auto w = welch_t_test(c, d, 0.05);
  CHECK(w.reject);
}

TEST_CASE("large-sample paths match reference values") {
  const std::vector<double> x(std::begin(kSampleX), std::end(kSampleX));
  const std::vector<double> y(std::begin(kSampleY), std::end(kSampleY));
  // scipy: mannwhitneyu asymptotic (continuity, tie correction) and exact KS.
  const auto u = mann_whitney_u(x, y, 0.05);
  CHECK(u.statistic == doctest::Approx(5249.0));
  CHECK(u.p_value == doctest::Approx(8.00867177933761e-06).epsilon(1e-6));
  const auto k = ks_two_sample(x, y, 0.05);
  CHECK(k.statistic == doctest::Approx(0.258974358974359).epsilon(1e-12));
  CHECK(k.p_value == doctest::Approx(0.0003505446637293604).epsilon(1e-6));
}

TEST_CASE("exact tests equal the brute-force permutation law, ties included") {
  std::mt19937_64 rng(77);
  for (int i = 0; i < 40; ++i) {
    const double grain = i % 2 == 0 ? 0.0 : 0.5;  // odd rounds are heavily tied
    const auto a = draw(rng, 2.0, 1.0, 6, grain);
    const auto b = draw(rng, 2.0 + 0.25 * (i % 8), 1.0, 6, grain);
    const auto o = brute_force(a, b);
    CAPTURE(i);
    CHECK(mann_whitney_u(a, b, 0.05).p_value == doctest::Approx(o.mw_p).epsilon(1e-12));
    CHECK(ks_two_sample(a, b, 0.05).p_value == doctest::Approx(o.ks_p).epsilon(1e-12));
    CHECK(mann_whitney_u(a, b, 0.05).statistic == doctest::Approx(u_pairs(a, b)));
    CHECK(ks_two_sample(a, b, 0.05).statistic == doctest::Approx(ks_d(a, b)));
  }
  // Unequal sizes too.
  const auto a = draw(rng, 0, 1, 4);
  const auto b = draw(rng, 1, 1, 7);
  const auto o = brute_force(a, b);
  CHECK(mann_whitney_u(a, b, 0.05).p_value == doctest::Approx(o.mw_p).epsilon(1e-12));
  CHECK(ks_two_sample(a, b, 0.05).p_value == doctest::Approx(o.ks_p).epsilon(1e-12));
}

TEST_CASE("reject decisions agree with the permutation oracle on random window pairs") {
  int disagree = 0;
  int i = 0;
  for (const auto& [cur, prev] : window_pairs(kWindowPairSeed, 50)) {
    const auto o = brute_force(cur, prev);
    const auto a = compare_samples(cur, prev, 0.05);
    const double oracle[3] = {o.welch_p, o.mw_p, o.ks_p};
    for (int t = 0; t < 3; ++t) {
      if (a.results[t].reject != (oracle[t] < 0.05)) {
        ++disagree;
        MESSAGE("pair ", i, " ", a.results[t].test_name, ": p = ", a.results[t].p_value, ", oracle p = ", oracle[t]);
      }
    }
    ++i;
  }
  CHECK(disagree <= 2);
}

TEST_CASE("identical windows give no change") {
  const std::vector<double> v{2.0, 2.3, 1.9, 2.4, 2.1, 2.2};
  const auto a = compare_samples(v, v, 0.05);
  for (const auto& r : a.results) {
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK_FALSE(r.reject);
  }
  CHECK_FALSE(a.vote);
  const std::vector<double> flat(6, 3.0);
  CHECK(welch_t_test(flat, flat, 0.05).p_value == 1.0);
  CHECK(welch_t_test(flat, std::vector<double>(6, 4.0), 0.05).p_value == 0.0);
}

TEST_CASE("a 2 to 6 m/s shift is detected") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    const auto a = compare_samples(draw(rng, 6, 0.1, 6), draw(rng, 2, 0.1, 6), 0.05);
    CHECK(a.vote);
    for (const auto& r : a.results) CHECK(r.reject);
  }
}

TEST_CASE("false-alert rate under no change stays near alpha") {
  std::mt19937_64 rng(99);
  int alerts = 0;
  for (int i = 0; i < 1000; ++i) alerts += compare_samples(draw(rng, 2, 0.5, 6), draw(rng, 2, 0.5, 6), 0.05).vote;
  MESSAGE("false alerts: ", alerts, " / 1000");
  CHECK(alerts <= 70);
}

TEST_CASE("vote is a majority of three") {
  for (int m = 0; m < 8; ++m) {
    const bool r1 = m & 1, r2 = m & 2, r3 = m & 4;
    CHECK(vote(r1, r2, r3) == (__builtin_popcount(m) >= 2));
  }
}

TEST_CASE("statistical inputs are validated") {
  const std::vector<double> one{1.0}, two{1.0, 2.0};
  CHECK(error_code([&] { welch_t_test(one, two, 0.05); }) == Errc::invalid_window);
  const std::vector<double> nan{1.0, std::nan("")};
  CHECK(error_code([&] { ks_two_sample(nan, two, 0.05); }) == Errc::invalid_window);
  CHECK(error_code([&] { compare_samples(two, two, 1.5); }) == Errc::invalid_argument);
}

TEST_CASE("telemetry generation") {
  WeatherModel m;
  const auto hour = generate_telemetry(m, 1, from_seconds(3600));
  REQUIRE(hour.size() == 12);
  for (std::size_t i = 0; i < hour.size(); ++i) CHECK(hour[i].timestamp == kCadence * static_cast<std::int64_t>(i));

  m.wind_speed = {2.0, 0.4, {}};
  const auto day = generate_telemetry(m, 2, from_seconds(86400 * 4));
  std::vector<double> ws;
  for (const auto& r : day) {
    ws.push_back(r.wind_speed);
    CHECK(r.humidity >= 0);
    CHECK(r.humidity <= 100);
    CHECK(r.wind_direction >= 0);
    CHECK(r.wind_direction < 360);
  }
  const double mean = std::accumulate(ws.begin(), ws.end(), 0.0) / ws.size();
  double ss = 0;
  for (double x : ws) ss += (x - mean) * (x - mean);
  CHECK(std::sqrt(ss / (ws.size() - 1)) == doctest::Approx(0.4).epsilon(0.1));

  m.wind_speed.shifts = {{from_seconds(1800), 6.0}};
  const auto shifted = generate_telemetry(m, 3, from_seconds(3600));
  double late = 0;
  for (std::size_t i = 6; i < 12; ++i) late += shifted[i].wind_speed / 6.0;
  CHECK(late == doctest::Approx(6.0).epsilon(0.1));
  CHECK(error_code([&] { generate_telemetry(m, 1, from_seconds(300)); }) == Errc::invalid_argument);

  m.humidity = {99.0, 20.0, {}};
  for (const auto& r : generate_telemetry(m, 4, from_seconds(86400))) {
    CHECK(r.humidity >= 0);
    CHECK(r.humidity <= 100);
  }
}

TEST_CASE("telemetry records have a fixed 72-byte layout") {
  TelemetryRecord r{from_seconds(600), 3.5, 270.0, 24.5, 61.0, "cups-north"};
  const auto b = r.encode();
  CHECK(b.size() == 72);
  CHECK(TelemetryRecord::decode(b) == r);
  CHECK(b[0] == 0x00);
  CHECK(b[1] == 0x46);  // 600,000,000 us = 0x23C34600 little-endian
  CHECK(b[2] == 0xC3);
  CHECK(b[3] == 0x23);
  CHECK(error_code([&] { TelemetryRecord::decode(std::span(b).first(71)); }) == Errc::decode_error);
  CHECK(parse_channel("humidity") == Channel::humidity);
  CHECK(error_code([] { parse_channel("rain"); }) == Errc::config_error);
}

TEST_CASE("windows are validated") {
  const std::vector<double> six{1, 2, 3, 4, 5, 6};
  const auto prev = window_of(six, SimTime{0});
  const auto cur = window_of(six, from_seconds(1800));
  CHECK_NOTHROW(detect_change(cur, prev));
  CHECK(error_code([&] { detect_change(prev, cur); }) == Errc::invalid_window);
  CHECK(error_code([&] { detect_change(cur, window_of(six, from_seconds(900))); }) == Errc::invalid_window);
  auto gap = cur;
  gap.records[3].timestamp += from_seconds(1);
  CHECK(error_code([&] { detect_change(gap, prev); }) == Errc::invalid_window);
  auto shortw = cur;
  shortw.records.pop_back();
  CHECK(error_code([&] { detect_change(shortw, prev); }) == Errc::invalid_window);
  const auto a = detect_change(window_of({6, 6.1, 5.9, 6.2, 6, 5.8}, from_seconds(1800)), window_of({2, 2.1, 1.9, 2.2, 2, 1.8}, SimTime{0}));
  CHECK(a.vote);
  CHECK(a.timestamp == from_seconds(1800 + 1500));
}

TEST_CASE("change op lays out per-channel results then the combined vote") {
  const auto op = change_op(0.05, 2);
  const dataflow::Value cur = dataflow::Value::of(std::vector<double>{6, 6.1, 5.9, 6.2, 6, 5.8, 1, 2, 3, 4, 5, 6});
  const dataflow::Value prev = dataflow::Value::of(std::vector<double>{2, 2.1, 1.9, 2.2, 2, 1.8, 1, 2, 3, 4, 5, 6});
  const auto out = op({cur, prev}).as_fvec();
  REQUIRE(out.size() == 15);
  CHECK(out[6] == 1.0);   // wind channel votes change
  CHECK(out[13] == 0.0);  // second channel does not
  CHECK(out[14] == 1.0);  // OR across channels
  CHECK(out[1] < 0.05);
}

TEST_CASE("one regime shift yields one alert and one CFD run") {
  const auto r = run_cups(shifted_scenario());
  for (const auto& v : r.violations) MESSAGE(v);
  CHECK(r.violations.empty());
  CHECK(r.telemetry.size() == 48);
  CHECK(r.detections.size() == 7);
  REQUIRE(r.alerts() == 1);
  const auto alert = *std::find_if(r.detections.begin(), r.detections.end(), [](const Detection& d) { return d.vote; });
  // Offline change point: the first window made only of post-shift readings.
  CHECK(alert.iteration == 4);
  CHECK(alert.window_end == from_seconds(7200 + 1500));
  CHECK(alert.detected_at - from_seconds(7200) <= from_seconds(1800));
  REQUIRE(r.runs.size() == 1);
  const auto& run = r.runs[0];
  REQUIRE(run.task.completed.has_value());
  CHECK(run.task.telemetry_time == alert.window_end);
  CHECK(to_seconds(run.task.runtime) == doctest::Approx(420.39).epsilon(0.25));
  CHECK(*run.validity == r.runs[0].detected_at + from_seconds(1800) - *run.task.completed);
  for (const auto& h : r.hops) {
    REQUIRE(h.at_edge.has_value());
    REQUIRE(h.at_repo.has_value());
    CHECK(*h.at_repo > *h.at_edge);
    CHECK(*h.at_edge > h.generated);
  }
}

TEST_CASE("no shift and low noise raise no alert") {
  CupsConfig c;
  c.weather.wind_speed.noise_sd = 0.05;
  const auto r = run_cups(c);
  CHECK(r.violations.empty());
  CHECK(r.alerts() == 0);
  CHECK(r.runs.empty());
}

TEST_CASE("a run is a pure function of its configuration") {
  const auto a = run_cups(shifted_scenario(7));
  const auto b = run_cups(shifted_scenario(7));
  CHECK(a.state == b.state);
  CHECK(a.finished == b.finished);
  CHECK(a.boundaries == b.boundaries);
  REQUIRE(a.runs.size() == b.runs.size());
  for (std::size_t i = 0; i < a.runs.size(); ++i) CHECK(a.runs[i].task.completed == b.runs[i].task.completed);
}

TEST_CASE("crashes at sampled boundaries leave the same final logs") {
  auto cfg = shifted_scenario();
  cfg.duration = from_seconds(3 * 3600);
  const auto clean = run_cups(cfg);
  CHECK(clean.violations.empty());
  REQUIRE(clean.alerts() == 1);
  for (std::uint64_t k = 0; k < clean.boundaries; k += 17) {
    cfg.crash_at = k;
    const auto r = run_cups(cfg);
    CAPTURE(k);
    CHECK(r.crashes == 1);
    CHECK(r.violations.empty());
    CHECK(r.state == clean.state);
  }
}

TEST_CASE("scenario validation") {
  CupsConfig c;
  c.duration = from_seconds(3000);
  CHECK(error_code([&] { run_cups(c); }) == Errc::scenario_invalid);
  c = CupsConfig{};
  c.alpha = 0;
  CHECK(error_code([&] { run_cups(c); }) == Errc::scenario_invalid);
  c = CupsConfig{};
  c.links.pop_back();
  CHECK(error_code([&] { run_cups(c); }) == Errc::scenario_invalid);
}
