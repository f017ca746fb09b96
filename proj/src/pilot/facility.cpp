/*
 * src/pilot/facility.cpp
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

#include "fabric/pilot/facility.hpp"

#include <algorithm>

#include "fabric/common/error.hpp"

namespace fabric::pilot {

BatchFacility::BatchFacility(netsim::Simulator& sim, SystemSpec system)
    : sim_(sim), system_(std::move(system)), rng_(sim.stream("facility/queue")), free_(system_.total_nodes) {
  if (system_.total_nodes == 0) throw Error(Errc::config_error, "facility needs at least one node");
  if (system_.cores_per_node == 0) throw Error(Errc::config_error, "nodes need at least one core");
}

std::uint64_t BatchFacility::submit(std::uint32_t nodes, Duration runtime) {
  if (nodes == 0 || nodes > system_.total_nodes) {
    throw Error(Errc::insufficient_resources,
                "pilot of " + std::to_string(nodes) + " nodes on a " +
                    std::to_string(system_.total_nodes) + "-node system");
  }
  if (runtime <= Duration{0} || runtime > system_.max_runtime) {
    throw Error(Errc::invalid_argument, "pilot runtime outside (0, max runtime]");
  }
  const auto id = next_id_++;
  pilots_[id] = PilotSpec{id, nodes, runtime, PilotState::queued, sim_.now(), std::nullopt};
  const auto delay = system_.queue_delay.sample(rng_);
  timers_[id] = sim_.schedule_after(delay, "pilot-eligible", [this, id] { eligible(id); },
                                    std::to_string(id));
  changed(id);
  return id;
}

void BatchFacility::eligible(std::uint64_t id) {
  timers_.erase(id);
  waiting_.push_back(id);
  start_waiting();
}

void BatchFacility::start_waiting() {
  while (!waiting_.empty()) {
    auto& p = pilots_.at(waiting_.front());
    if (p.nodes > free_) return;
    waiting_.pop_front();
    free_ -= p.nodes;
    p.state = PilotState::active;
    p.activate_time = sim_.now();
    const auto id = p.id;
    timers_[id] = sim_.schedule_after(p.runtime, "pilot-expire", [this, id] { expire(id); },
                                      std::to_string(id));
    changed(id);
  }
}

void BatchFacility::expire(std::uint64_t id) {
  timers_.erase(id);
  if (auto it = busy_.find(id); it != busy_.end()) {
    it->second = true;
    return;
  }
  finish(id, PilotState::expired);
}

void BatchFacility::release(std::uint64_t id) {
  auto& p = pilots_.at(id);
  if (p.state == PilotState::done || p.state == PilotState::expired) return;
  if (auto t = timers_.find(id); t != timers_.end()) {
    sim_.cancel(t->second);
    timers_.erase(t);
  }
  waiting_.erase(std::remove(waiting_.begin(), waiting_.end(), id), waiting_.end());
  busy_.erase(id);
  finish(id, PilotState::done);
}

void BatchFacility::set_busy(std::uint64_t id, bool busy) {
  const auto& p = pilot(id);
  if (busy) {
    if (p.state != PilotState::active) {
      throw Error(Errc::insufficient_resources, "pilot " + std::to_string(id) + " is not active");
    }
    busy_.emplace(id, false);
    return;
  }
  auto it = busy_.find(id);
  if (it == busy_.end()) return;
  const bool overdue = it->second;
  busy_.erase(it);
  if (overdue) finish(id, PilotState::expired);
}

void BatchFacility::finish(std::uint64_t id, PilotState state) {
  auto& p = pilots_.at(id);
  if (p.state == PilotState::active) free_ += p.nodes;
  p.state = state;
  changed(id);
  start_waiting();
}

const PilotSpec& BatchFacility::pilot(std::uint64_t id) const {
  auto it = pilots_.find(id);
  if (it == pilots_.end()) throw Error(Errc::invalid_argument, "no pilot " + std::to_string(id));
  return it->second;
}

std::vector<PilotSpec> BatchFacility::pilots() const {
  std::vector<PilotSpec> out;
  out.reserve(pilots_.size());
  for (const auto& [id, p] : pilots_) out.push_back(p);
  return out;
}

void BatchFacility::changed(std::uint64_t id) {
  const auto snapshot = pilots_.at(id);
  for (const auto& fn : listeners_) fn(snapshot);
}

}  // namespace fabric::pilot
