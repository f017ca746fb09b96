/*
 * src/netsim/simulator.cpp
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

#include "fabric/netsim/simulator.hpp"

#include <cstring>

#include "json.hpp"

#include "fabric/common/error.hpp"
#include "fabric/common/message_id.hpp"

namespace fabric::netsim {

Simulator::Simulator(std::uint64_t seed) : seed_(seed) {}

EventId Simulator::schedule_at(SimTime when, std::string kind, std::function<void()> fn,
                               std::string detail) {
  if (when < now_) {
    throw Error(Errc::invalid_argument, "cannot schedule '" + kind + "' in the past");
  }
  const EventId id = next_id_++;
  queue_.push(Pending{when, id, std::move(kind), std::move(detail), std::move(fn)});
  return id;
}

EventId Simulator::schedule_after(Duration delay, std::string kind, std::function<void()> fn,
                                  std::string detail) {
  return schedule_at(now_ + delay, std::move(kind), std::move(fn), std::move(detail));
}

bool Simulator::cancel(EventId id) {
  if (id == 0 || id >= next_id_) return false;
  return cancelled_.insert(id).second;
}

bool Simulator::fire_next(SimTime limit, std::vector<TraceEvent>* fired) {
  while (!queue_.empty()) {
    if (queue_.top().time > limit) return false;
    // priority_queue::top is const; the element is popped right after.
    Pending ev = std::move(const_cast<Pending&>(queue_.top()));
    queue_.pop();
    if (cancelled_.erase(ev.id) != 0) continue;
    now_ = ev.time;
    if (tracing_ || fired) {
      TraceEvent t{ev.time, ev.id, ev.kind, ev.detail};
      if (tracing_) trace_.push_back(t);
      if (fired) fired->push_back(std::move(t));
    }
    ev.fn();
    return true;
  }
  return false;
}

std::vector<TraceEvent> Simulator::advance(SimTime until) {
  if (until < now_) throw Error(Errc::invalid_argument, "advance target is in the past");
  std::vector<TraceEvent> fired;
  while (fire_next(until, &fired)) {
  }
  now_ = until;
  return fired;
}

bool Simulator::run_until(const std::function<bool()>& done, SimTime deadline) {
  while (!done()) {
    if (!fire_next(deadline, nullptr)) return done();
  }
  return true;
}

std::mt19937_64 Simulator::stream(std::string_view name) const {
  const auto id = MessageIdBuilder().add("stream").add(seed_).add(name).finish();
  std::uint64_t s;
  std::memcpy(&s, id.bytes.data(), sizeof(s));
  return std::mt19937_64(s);
}

void Simulator::annotate(std::string kind, std::string detail) {
  if (!tracing_) return;
  trace_.push_back(TraceEvent{now_, 0, std::move(kind), std::move(detail)});
}

std::string Simulator::trace_jsonl() const {
  std::string out;
  for (const auto& t : trace_) {
    nlohmann::json j = {{"t_us", t.time.count()}, {"id", t.id}, {"kind", t.kind}};
    if (!t.detail.empty()) j["detail"] = t.detail;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::uint64_t Simulator::trace_hash() const {
  const auto jsonl = trace_jsonl();
  const auto id = MessageIdBuilder().add(jsonl).finish();
  std::uint64_t h;
  std::memcpy(&h, id.bytes.data(), sizeof(h));
  return h;
}

}  // namespace fabric::netsim
