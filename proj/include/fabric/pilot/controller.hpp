/*
 * include/fabric/pilot/controller.hpp
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

#include <functional>
#include <map>
#include <optional>
#include <string>

#include "fabric/common/bytes.hpp"
#include "fabric/pilot/facility.hpp"

namespace fabric::pilot {

/// Reactive submits a pilot when a task needs one and releases it when
/// idle. Proactive keeps a placeholder pilot queued or running at all
/// times and still submits more when a task needs more nodes.
enum class Strategy { reactive, proactive };
std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct ControllerOptions {
  Strategy strategy = Strategy::proactive;
  bool count_queued = false;  // default: only active pilots count as available
  std::uint32_t placeholder_nodes = 1;
};

struct TaskRecord {
  std::uint64_t id = 0;
  std::optional<std::string> key;
  TaskSpec spec;
  SimTime telemetry_time{0};
  SimTime requested{0};
  std::uint32_t nodes_required = 1;
  std::optional<std::uint64_t> submitted_pilot;  // pilot submitted on its behalf
  std::optional<std::uint64_t> pilot;             // pilot it ran on
  std::optional<SimTime> started;
  std::optional<SimTime> completed;
  Duration runtime{0};
};

struct AuditEvent {
  SimTime time{0};
  std::string kind;
  std::uint64_t pilot = 0;
  std::uint64_t task = 0;
  std::string detail;

  Bytes encode() const;
  static AuditEvent decode(std::span<const std::uint8_t> bytes);
};

/// Matches CFD task requests to pilots following the allocation equations.
class PilotController {
 public:
  using TaskListener = std::function<void(const TaskRecord&)>;
  using AuditSink = std::function<void(const AuditEvent&)>;

  PilotController(BatchFacility& facility, CfdCostModel model, ControllerOptions options = {});

  /// Submits the initial placeholder under the proactive strategy.
  void start();
  /// A keyed task is submitted once: repeating the key returns the first
  /// task's id. Its runtime draw depends only on the key.
  std::uint64_t submit_task(const TaskSpec& task, SimTime telemetry_time,
                            std::optional<std::string> key = std::nullopt);

  void on_complete(TaskListener fn) { complete_listeners_.push_back(std::move(fn)); }
  void set_audit_sink(AuditSink fn) { audit_sink_ = std::move(fn); }

  const TaskRecord& task(std::uint64_t id) const { return tasks_.at(id); }
  std::vector<TaskRecord> tasks() const;
  const std::vector<AuditEvent>& audit() const { return audit_; }
  std::size_t waiting() const { return queue_.size(); }

 private:
  void pilot_changed(const PilotSpec& p);
  void dispatch();
  void complete(std::uint64_t task_id, std::uint64_t pilot_id);
  void submit_placeholder();
  void log(std::string kind, std::uint64_t pilot, std::uint64_t task, std::string detail = {});

  BatchFacility& facility_;
  netsim::Simulator& sim_;
  CfdCostModel model_;
  ControllerOptions options_;
  std::mt19937_64 rng_;
  std::uint64_t next_task_ = 1;
  std::map<std::uint64_t, TaskRecord> tasks_;
  std::map<std::string, std::uint64_t> by_key_;
  std::vector<std::uint64_t> queue_;
  std::map<std::uint64_t, bool> placeholders_;  // pilot id -> still current
  std::vector<TaskListener> complete_listeners_;
  std::vector<AuditEvent> audit_;
  AuditSink audit_sink_;
  bool started_ = false;
};

}  // namespace fabric::pilot
