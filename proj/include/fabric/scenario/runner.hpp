/*
 * include/fabric/scenario/runner.hpp
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

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <utility>
#include <vector>

#include "fabric/scenario/config.hpp"
#include "fabric/scenario/report.hpp"
#include "fabric/transport/latency.hpp"

namespace fabric::scenario {

struct PathLatency {
  PathDecl path;
  transport::LatencyStats stats;  // first sample discarded
};

std::vector<PathLatency> measure_paths(const LatencySpec& spec, std::uint64_t seed);

/// One complementary slice configuration: the second UE holds k*10 % of
/// the resource blocks, the first UE the rest.
struct SlicePoint {
  int k = 0;
  struct Ue {
    netsim::NodeId id;
    double fraction = 0;
    double model_mbps = 0;
    std::vector<netsim::TransferRecord> records;
    std::vector<double> mbps;
    double mean_mbps = 0;
    double sd_mbps = 0;
  };
  Ue low;   // first UE, (10-k)*10 %
  Ue high;  // second UE, k*10 %
};

std::vector<SlicePoint> slicing_curve(const SlicingSpec& spec, std::uint64_t seed);

/// Back-to-back CFD runs on a dedicated, never-queued pilot.
struct SustainedRun {
  std::vector<pilot::TaskRecord> tasks;  // completion order
  /// Mean time between completions: makespan over task count.
  double interval_s = 0;
};

SustainedRun sustained_throughput(const pipeline::CupsConfig& config, int tasks);

/// Runs a scenario and assembles its report. Invariant failures observed
/// during the run are listed in the report, not thrown.
MetricsReport run_scenario(const ScenarioConfig& config);

struct SweepResult {
  std::vector<MetricsReport> reports;  // seed order
  bool ok() const;
  /// One row per seed: seed, ok, then every summary scalar.
  Table per_seed() const;
  /// Mean, SD, min and max of each summary scalar across seeds.
  Table across_seeds() const;
};

/// Inclusive seed range "A..B".
std::pair<std::uint64_t, std::uint64_t> parse_seed_range(std::string_view text);

/// Runs the scenario once per seed, `jobs` runs at a time.
SweepResult run_sweep(const ScenarioConfig& config, std::uint64_t first, std::uint64_t last,
                      unsigned jobs = 0);

/// Writes seed-<n>/ report directories plus sweep.csv and sweep_stats.csv.
void write_sweep(const SweepResult& sweep, const std::filesystem::path& dir);

}  // namespace fabric::scenario
