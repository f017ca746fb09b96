/*
 * include/fabric/scenario/config.hpp
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
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fabric/netsim/network.hpp"
#include "fabric/pipeline/cups.hpp"

namespace fabric::scenario {

/// Version of both the scenario file format and report.json.
inline constexpr int kSchemaVersion = 1;

enum class Kind { latency, slicing, cups, queue_sweep };
std::string_view to_string(Kind k);

struct NodeDecl {
  netsim::NodeId id;
  double ue_efficiency = 1.0;
};

struct PathDecl {
  std::string name;
  netsim::NodeId from;
  netsim::NodeId to;
};

/// Back-to-back appends over each path; the first of each series is
/// discarded (it pays for connection setup).
struct LatencySpec {
  std::vector<NodeDecl> nodes;
  std::vector<netsim::LinkSpec> links;
  std::vector<PathDecl> paths;
  std::uint32_t payload_bytes = 1024;
  int messages = 30;
  bool size_cache = false;
  bool connection_setup = true;
};

/// Two UEs behind one radio link, given complementary slices k*10 % and
/// (10-k)*10 % for k = 1..9.
struct SlicingSpec {
  netsim::NodeId gnb = "gnb";
  std::vector<NodeDecl> ues;  // exactly two; the second gets k*10 %
  double base_capacity_mbps = 48.3;
  double latency_mean_ms = 20.0;
  double interval_s = 1.0;
  int samples = 1000;
  netsim::ThroughputModel noise;
};

struct CupsSpec {
  pipeline::CupsConfig config;
  /// Back-to-back tasks on one dedicated node, for the sustained rate.
  int sustained_tasks = 0;
  double histogram_bin_s = 10.0;
};

/// The pipeline run once per (strategy, queue delay model) pair.
struct QueueSweepSpec {
  pipeline::CupsConfig base;
  std::vector<pilot::Strategy> strategies;
  std::vector<pilot::QueueDelayModel> queue_delays;
};

struct ScenarioConfig {
  std::string name;
  std::uint64_t seed = 1;
  std::variant<LatencySpec, SlicingSpec, CupsSpec, QueueSweepSpec> spec;

  Kind kind() const { return static_cast<Kind>(spec.index()); }
  /// Replaces the master seed, including the one inside pipeline configs.
  void set_seed(std::uint64_t seed);
};

/// Strict parse: every object is checked for unknown keys and every field
/// for type and range. Failures throw config_error naming the key path.
ScenarioConfig parse_scenario(std::string_view text, const std::string& origin = "<string>");
ScenarioConfig load_scenario(const std::filesystem::path& path);

}  // namespace fabric::scenario
