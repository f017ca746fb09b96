/*
 * include/fabric/pilot/facility.hpp
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

#include <deque>
#include <functional>
#include <map>
#include <random>

#include "fabric/netsim/simulator.hpp"
#include "fabric/pilot/allocation.hpp"

namespace fabric::pilot {

/// A batch system holding pilots. A submitted pilot waits out a sampled
/// queue delay, then starts once enough nodes are free (first come, first
/// served) and expires after its runtime. A busy pilot's expiry waits for
/// the task on it to finish.
class BatchFacility {
 public:
  using Listener = std::function<void(const PilotSpec&)>;

  BatchFacility(netsim::Simulator& sim, SystemSpec system);

  /// Throws insufficient_resources if the request can never be met.
  std::uint64_t submit(std::uint32_t nodes, Duration runtime);
  /// Ends a queued or active pilot early.
  void release(std::uint64_t id);
  void set_busy(std::uint64_t id, bool busy);
  bool busy(std::uint64_t id) const { return busy_.count(id) != 0; }

  const PilotSpec& pilot(std::uint64_t id) const;
  std::vector<PilotSpec> pilots() const;
  std::uint32_t free_nodes() const { return free_; }
  const SystemSpec& system() const { return system_; }
  netsim::Simulator& simulator() { return sim_; }

  void on_change(Listener fn) { listeners_.push_back(std::move(fn)); }

 private:
  void eligible(std::uint64_t id);
  void start_waiting();
  void expire(std::uint64_t id);
  void finish(std::uint64_t id, PilotState state);
  void changed(std::uint64_t id);

  netsim::Simulator& sim_;
  SystemSpec system_;
  std::mt19937_64 rng_;
  std::uint32_t free_;
  std::uint64_t next_id_ = 1;
  std::map<std::uint64_t, PilotSpec> pilots_;
  std::map<std::uint64_t, netsim::EventId> timers_;
  std::deque<std::uint64_t> waiting_;
  std::map<std::uint64_t, bool> busy_;  // value: expiry overdue
  std::vector<Listener> listeners_;
};

}  // namespace fabric::pilot
