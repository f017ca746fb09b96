/*
 * include/fabric/netsim/simulator.hpp
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
#include <functional>
#include <queue>
#include <random>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "fabric/common/time.hpp"

namespace fabric::netsim {

using EventId = std::uint64_t;

struct TraceEvent {
  SimTime time{0};
  EventId id = 0;
  std::string kind;
  std::string detail;
};

/// Single-threaded discrete-event clock. Events at equal timestamps fire in
/// the order they were scheduled.
class Simulator {
 public:
  explicit Simulator(std::uint64_t seed = 1);

  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  SimTime now() const { return now_; }
  std::uint64_t seed() const { return seed_; }

  EventId schedule_at(SimTime when, std::string kind, std::function<void()> fn,
                      std::string detail = {});
  EventId schedule_after(Duration delay, std::string kind, std::function<void()> fn,
                         std::string detail = {});
  bool cancel(EventId id);

  /// Fires every event with timestamp <= until, then sets the clock to until.
  std::vector<TraceEvent> advance(SimTime until);
  /// Runs until the queue drains, `done` returns true, or the clock would
  /// pass `deadline`. Returns true if `done` was satisfied.
  bool run_until(const std::function<bool()>& done, SimTime deadline);
  std::size_t pending() const { return queue_.size() - cancelled_.size(); }

  /// Independent deterministic random stream for a named component.
  std::mt19937_64 stream(std::string_view name) const;

  /// Records every fired event; off by default.
  void set_tracing(bool on) { tracing_ = on; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  std::string trace_jsonl() const;
  std::uint64_t trace_hash() const;
  /// Adds a non-event annotation (drops, crashes) to the trace.
  void annotate(std::string kind, std::string detail);

 private:
  struct Pending {
    SimTime time;
    EventId id;
    std::string kind;
    std::string detail;
    std::function<void()> fn;
  };
  struct Later {
    bool operator()(const Pending& a, const Pending& b) const {
      return a.time != b.time ? a.time > b.time : a.id > b.id;
    }
  };

  bool fire_next(SimTime limit, std::vector<TraceEvent>* fired);

  std::uint64_t seed_;
  SimTime now_{0};
  EventId next_id_ = 1;
  std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
  std::unordered_set<EventId> cancelled_;
  bool tracing_ = false;
  std::vector<TraceEvent> trace_;
};

}  // namespace fabric::netsim
