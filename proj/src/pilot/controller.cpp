/*
 * src/pilot/controller.cpp
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

#include "fabric/pilot/controller.hpp"

#include <algorithm>

#include "fabric/common/error.hpp"

namespace fabric::pilot {

std::string_view to_string(Strategy s) { return s == Strategy::reactive ? "reactive" : "proactive"; }

Strategy parse_strategy(std::string_view s) {
  if (s == "reactive") return Strategy::reactive;
  if (s == "proactive") return Strategy::proactive;
  throw Error(Errc::config_error, "unknown pilot strategy '" + std::string(s) + "'");
}

Bytes AuditEvent::encode() const {
  ByteWriter w;
  w.i64(time.count()).str16(kind).u64(pilot).u64(task).str16(detail);
  return w.take();
}

AuditEvent AuditEvent::decode(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  AuditEvent e;
  e.time = SimTime{r.i64()};
  e.kind = r.str16();
  e.pilot = r.u64();
  e.task = r.u64();
  e.detail = r.str16();
  return e;
}

PilotController::PilotController(BatchFacility& facility, CfdCostModel model, ControllerOptions options)
    : facility_(facility),
      sim_(facility.simulator()),
      model_(std::move(model)),
      options_(options),
      rng_(sim_.stream("pilot/tasks")) {
  facility_.on_change([this](const PilotSpec& p) { pilot_changed(p); });
}

void PilotController::start() {
  if (started_) return;
  started_ = true;
  if (options_.strategy == Strategy::proactive) submit_placeholder();
}

void PilotController::submit_placeholder() {
  const auto& sys = facility_.system();
  const auto nodes = std::min(sys.total_nodes, std::max<std::uint32_t>(1, options_.placeholder_nodes));
  const auto id = facility_.submit(nodes, sys.max_runtime);
  placeholders_[id] = true;
  log("placeholder-submit", id, 0, std::to_string(nodes) + " nodes");
}

std::uint64_t PilotController::submit_task(const TaskSpec& task, SimTime telemetry_time,
                                          std::optional<std::string> key) {
  if (key) {
    if (auto it = by_key_.find(*key); it != by_key_.end()) return it->second;
  }
  const auto id = next_task_++;
  if (key) by_key_[*key] = id;
  TaskRecord rec;
  rec.id = id;
  rec.key = std::move(key);
  rec.spec = task;
  rec.telemetry_time = telemetry_time;
  rec.requested = sim_.now();
  rec.nodes_required = required_nodes(task.data_size, task.threshold);
  // The task's core count sets a floor too: a 64-core run needs 64 cores.
  const auto cpn = facility_.system().cores_per_node;
  rec.nodes_required = std::max(rec.nodes_required, (task.cores + cpn - 1) / cpn);

  const auto pilots = facility_.pilots();
  const auto avail = available_nodes(pilots, sim_.now(), options_.count_queued);
  const auto decision = decide_submit(rec.nodes_required, avail);
  log("task-request", 0, id,
      "n_req=" + std::to_string(rec.nodes_required) + " n_avail=" + std::to_string(avail) +
          " submit=" + (decision == Decision::yes ? "yes" : "no"));
  if (decision == Decision::yes) {
    const auto params = pilot_parameters(rec.nodes_required, task, facility_.system());
    const auto pid = facility_.submit(params.nodes, params.runtime);
    rec.submitted_pilot = pid;
    log("pilot-submit", pid, id, std::to_string(params.nodes) + " nodes");
  }
  tasks_[id] = rec;
  queue_.push_back(id);
  dispatch();
  return id;
}

void PilotController::pilot_changed(const PilotSpec& p) {
  switch (p.state) {
    case PilotState::queued:
      return;
    case PilotState::active:
      log("pilot-active", p.id, 0);
      dispatch();
      // A reactive pilot can start after its task already ran elsewhere.
      if (options_.strategy == Strategy::reactive && !facility_.busy(p.id)) facility_.release(p.id);
      return;
    case PilotState::done:
    case PilotState::expired:
      log(p.state == PilotState::done ? "pilot-released" : "pilot-expired", p.id, 0);
      if (auto it = placeholders_.find(p.id); it != placeholders_.end() && it->second) {
        it->second = false;
        if (started_) submit_placeholder();
      }
      return;
  }
}

void PilotController::dispatch() {
  const auto pilots = facility_.pilots();
  const auto cpn = static_cast<std::uint64_t>(facility_.system().cores_per_node);
  for (auto it = queue_.begin(); it != queue_.end();) {
    auto& rec = tasks_.at(*it);
    const PilotSpec* chosen = nullptr;
    for (const auto& p : pilots) {
      if (p.state != PilotState::active || facility_.busy(p.id)) continue;
      if (p.nodes * cpn < rec.spec.cores) continue;
      chosen = &p;
      break;
    }
    if (chosen == nullptr) {
      ++it;
      continue;
    }
    auto keyed = rec.key ? std::optional(sim_.stream("pilot/task/" + *rec.key)) : std::nullopt;
    const auto result = execute_task(rec.spec, *chosen, facility_.system(), model_, keyed ? *keyed : rng_,
                                     sim_.now(), rec.telemetry_time);
    facility_.set_busy(chosen->id, true);
    rec.pilot = chosen->id;
    rec.started = result.start;
    rec.runtime = result.runtime;
    log("task-start", chosen->id, rec.id);
    const auto tid = rec.id;
    const auto pid = chosen->id;
    sim_.schedule_at(result.completion, "task-complete", [this, tid, pid] { complete(tid, pid); },
                     std::to_string(tid));
    it = queue_.erase(it);
    // Busy flags changed; refresh the view for the next task.
    return dispatch();
  }
}

void PilotController::complete(std::uint64_t task_id, std::uint64_t pilot_id) {
  auto& rec = tasks_.at(task_id);
  rec.completed = sim_.now();
  log("task-complete", pilot_id, task_id);
  facility_.set_busy(pilot_id, false);
  dispatch();
  // Reactive pilots are returned as soon as nothing is left for them.
  if (options_.strategy == Strategy::reactive && !facility_.busy(pilot_id) &&
      facility_.pilot(pilot_id).state == PilotState::active) {
    facility_.release(pilot_id);
  }
  const auto snapshot = rec;
  for (const auto& fn : complete_listeners_) fn(snapshot);
}

std::vector<TaskRecord> PilotController::tasks() const {
  std::vector<TaskRecord> out;
  for (const auto& [id, t] : tasks_) out.push_back(t);
  return out;
}

void PilotController::log(std::string kind, std::uint64_t pilot, std::uint64_t task, std::string detail) {
  AuditEvent e{sim_.now(), std::move(kind), pilot, task, std::move(detail)};
  if (audit_sink_) audit_sink_(e);
  audit_.push_back(std::move(e));
}

}  // namespace fabric::pilot
