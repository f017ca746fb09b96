/*
 * include/fabric/pilot/allocation.hpp
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
#include <optional>
#include <span>
#include <string_view>

#include "fabric/common/time.hpp"
#include "fabric/pilot/cost_model.hpp"

namespace fabric::pilot {

struct SystemSpec {
  std::uint32_t total_nodes = 1;
  std::uint32_t cores_per_node = 64;
  Duration max_runtime = from_seconds(48 * 3600.0);
  QueueDelayModel queue_delay;
};

enum class PilotState { queued, active, done, expired };
std::string_view to_string(PilotState s);

struct PilotSpec {
  std::uint64_t id = 0;
  std::uint32_t nodes = 1;
  Duration runtime{0};
  PilotState state = PilotState::queued;
  SimTime submit_time{0};
  std::optional<SimTime> activate_time;
};

struct TaskSpec {
  std::uint64_t data_size = 0;  // D, bytes
  std::uint64_t threshold = 1;  // bytes per node
  Duration estimated_runtime = from_seconds(420.39);
  std::uint32_t cores = 64;
};

/// max(1, ceil(D / threshold)).
std::uint32_t required_nodes(std::uint64_t data_size, std::uint64_t threshold);

/// Nodes held by active pilots. Queued pilots count only when asked to.
std::uint32_t available_nodes(std::span<const PilotSpec> pilots, SimTime now,
                              bool count_queued = false);

enum class Decision { no, yes };
Decision decide_submit(std::uint32_t n_req, std::uint32_t n_avail);

struct PilotParameters {
  std::uint32_t nodes = 1;
  Duration runtime{0};
};

/// nodes = min(system nodes, N_req); runtime = min(max runtime, estimate).
PilotParameters pilot_parameters(std::uint32_t n_req, const TaskSpec& task, const SystemSpec& system);

struct TaskResult {
  SimTime start{0};
  SimTime completion{0};
  Duration runtime{0};
  SimTime telemetry_time{0};  // the conditions the run reproduces
};

/// Runs a task on an active pilot. Throws insufficient_resources when the
/// pilot is not active or too small.
TaskResult execute_task(const TaskSpec& task, const PilotSpec& pilot, const SystemSpec& system,
                        const CfdCostModel& model, std::mt19937_64& rng, SimTime start,
                        SimTime telemetry_time);

}  // namespace fabric::pilot
