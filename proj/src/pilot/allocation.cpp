/*
 * src/pilot/allocation.cpp
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

#include "fabric/pilot/allocation.hpp"

#include <algorithm>

#include "fabric/common/error.hpp"

namespace fabric::pilot {

std::string_view to_string(PilotState s) {
  switch (s) {
    case PilotState::queued:
      return "queued";
    case PilotState::active:
      return "active";
    case PilotState::done:
      return "done";
    case PilotState::expired:
      return "expired";
  }
  return "?";
}

std::uint32_t required_nodes(std::uint64_t data_size, std::uint64_t threshold) {
  if (threshold == 0) throw Error(Errc::invalid_argument, "threshold must be positive");
  const std::uint64_t n = data_size / threshold + (data_size % threshold != 0 ? 1 : 0);
  return static_cast<std::uint32_t>(std::max<std::uint64_t>(1, n));
}

std::uint32_t available_nodes(std::span<const PilotSpec> pilots, SimTime now, bool count_queued) {
  std::uint32_t n = 0;
  for (const auto& p : pilots) {
    const bool active = p.state == PilotState::active && p.activate_time && *p.activate_time <= now;
    if (active || (count_queued && p.state == PilotState::queued)) n += p.nodes;
  }
  return n;
}

Decision decide_submit(std::uint32_t n_req, std::uint32_t n_avail) {
  return n_avail >= n_req ? Decision::no : Decision::yes;
}

PilotParameters pilot_parameters(std::uint32_t n_req, const TaskSpec& task, const SystemSpec& system) {
  return PilotParameters{std::min(system.total_nodes, n_req),
                         std::min(system.max_runtime, task.estimated_runtime)};
}

TaskResult execute_task(const TaskSpec& task, const PilotSpec& pilot, const SystemSpec& system,
                        const CfdCostModel& model, std::mt19937_64& rng, SimTime start,
                        SimTime telemetry_time) {
  if (pilot.state != PilotState::active) {
    throw Error(Errc::insufficient_resources,
                "pilot " + std::to_string(pilot.id) + " is " + std::string(to_string(pilot.state)));
  }
  if (static_cast<std::uint64_t>(pilot.nodes) * system.cores_per_node < task.cores) {
    throw Error(Errc::insufficient_resources, "pilot " + std::to_string(pilot.id) + " has too few cores");
  }
  // Cores are spread over as few nodes as hold them.
  const std::uint32_t nodes = std::max<std::uint32_t>(
      1, (task.cores + system.cores_per_node - 1) / system.cores_per_node);
  const auto runtime = model.sample(std::min(task.cores, system.cores_per_node), nodes, rng);
  return TaskResult{start, start + runtime, runtime, telemetry_time};
}

}  // namespace fabric::pilot
