/*
 * include/fabric/pipeline/cups.hpp
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
#include <optional>

#include "fabric/events/node.hpp"
#include "fabric/netsim/network.hpp"
#include "fabric/pilot/controller.hpp"
#include "fabric/pipeline/detector.hpp"

namespace fabric::pipeline {

inline constexpr const char* kStation = "station";
inline constexpr const char* kEdge = "unl-edge";
inline constexpr const char* kRepo = "ucsb-repo";
inline constexpr const char* kHpc = "nd-hpc";

inline constexpr const char* kTelemetryLog = "cups/telemetry";
inline constexpr const char* kAlertLog = "cups/alerts";
inline constexpr const char* kAuditLog = "__sys/pilot";

/// Station (5G UE) -> UNL edge -> UCSB repository -> ND HPC. Link defaults
/// put the one-way path latencies at 25.25, 4.25 and 23 ms.
std::vector<netsim::LinkSpec> default_cups_links();

struct CupsConfig {
  std::uint64_t seed = 1;
  Duration duration = from_seconds(4 * 3600.0);
  WeatherModel weather;
  std::string station_id = "cups-1";
  double alpha = kDefaultAlpha;
  std::vector<Channel> channels{Channel::wind_speed};
  std::size_t window_size = kWindowSize;
  std::vector<netsim::LinkSpec> links = default_cups_links();
  transport::ClientOptions client;
  pilot::SystemSpec system;
  pilot::ControllerOptions controller;
  pilot::CfdCostModel cost = pilot::CfdCostModel::standard();
  pilot::TaskSpec task;
  /// Time allowed after the last reading for in-flight work to finish.
  Duration drain = from_seconds(72 * 3600.0);

  /// Fault injection: crash the node hitting the n-th handler boundary on
  /// the edge, repository or HPC node, restarting it after `restart_after`.
  std::optional<std::uint64_t> crash_at;
  Duration restart_after = from_seconds(10);

  Duration duty_cycle() const { return weather.cadence * static_cast<std::int64_t>(window_size); }
  void validate() const;
};

struct HopTiming {
  std::uint64_t index = 0;
  SimTime generated{0};
  std::optional<SimTime> at_edge;
  std::optional<SimTime> at_repo;
};

/// One detector evaluation. `detail` is the detector output vector.
struct Detection {
  std::uint64_t iteration = 0;
  SimTime window_end{0};
  SimTime detected_at{0};
  std::vector<double> detail;
  bool vote = false;
};

struct CfdRun {
  std::uint64_t iteration = 0;
  pilot::TaskRecord task;
  SimTime detected_at{0};
  /// Time left in the duty cycle once the result exists: detection plus
  /// one duty cycle, minus completion. Negative means the next cycle began.
  std::optional<Duration> validity;
};

struct LogDump {
  logstore::Seq next_seq = 1;
  std::vector<std::tuple<logstore::Seq, std::string, Bytes>> entries;  // seq, id hex, payload
  bool operator==(const LogDump&) const = default;
};
using NodeState = std::map<std::string, LogDump>;

struct CupsResult {
  std::vector<TelemetryRecord> telemetry;
  std::vector<HopTiming> hops;
  std::vector<Detection> detections;
  std::vector<CfdRun> runs;
  std::vector<pilot::AuditEvent> audit;
  std::uint64_t boundaries = 0;  // handler boundaries seen by the crash probe
  std::uint64_t crashes = 0;
  SimTime finished{0};
  /// Every log on the edge, repository and HPC nodes except the pilot
  /// audit log (its timing depends on when crashes happen).
  std::map<std::string, NodeState> state;
  /// Invariant violations noticed while running; empty on a clean run.
  std::vector<std::string> violations;

  std::size_t alerts() const;
};

/// Runs the telemetry, change detection and CFD trigger pipeline on one
/// simulated clock.
CupsResult run_cups(const CupsConfig& config);

NodeState dump_logs(const events::FabricNode& node, const std::vector<std::string>& skip = {});

}  // namespace fabric::pipeline
