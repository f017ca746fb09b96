/*
 * src/transport/client.cpp
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

#include "fabric/transport/client.hpp"

#include <algorithm>

namespace fabric::transport {

Duration RetryPolicy::timeout(int attempt) const {
  Duration t = base;
  for (int i = 0; i < attempt && t < cap; ++i) t *= 2;
  return std::min(t, cap);
}

SimClient::SimClient(netsim::Network& net, NodeId self, ClientOptions options, Send send)
    : net_(net),
      self_(std::move(self)),
      options_(options),
      send_(std::move(send)),
      rng_(net.simulator().stream("client/" + self_)),
      alive_(std::make_shared<bool>(true)) {}

SimClient::~SimClient() { reset(); }

void SimClient::set_size_cache(bool on) {
  options_.size_cache = on;
  if (!on) cache_.clear();
}

void SimClient::invalidate_cache(const NodeId& target, const std::string& log) {
  cache_.erase({target, log});
}

std::optional<std::uint32_t> SimClient::cached_size(const NodeId& target,
                                                    const std::string& log) const {
  auto it = cache_.find({target, log});
  if (it == cache_.end()) return std::nullopt;
  return it->second.element_size;
}

void SimClient::reset() {
  auto& sim = net_.simulator();
  for (auto& [rid, op] : ops_) {
    if (op.timer != 0) sim.cancel(op.timer);
  }
  ops_.clear();
  cache_.clear();
  connected_.clear();
  // Events already scheduled by this incarnation must not touch new state.
  *alive_ = false;
  alive_ = std::make_shared<bool>(true);
}

void SimClient::remote_append(const NodeId& target, const std::string& log, const MessageId& id,
                              Bytes payload, Callback done) {
  auto& sim = net_.simulator();
  std::uint64_t rid;
  do {
    rid = rng_();
  } while (rid == 0 || ops_.count(rid));

  Op op;
  op.target = target;
  op.log = log;
  op.id = id;
  op.payload = std::move(payload);
  op.done = std::move(done);
  op.outcome.message_id = id;
  op.outcome.started = sim.now();
  ++stats_.started;

  if (!net_.reachable(self_, target) || !net_.reachable(target, self_)) {
    op.outcome.error = Errc::route_unreachable;
    op.outcome.message = "no route " + self_ + " <-> " + target;
    op.outcome.finished = sim.now();
    ++stats_.failed;
    if (op.done) op.done(op.outcome);
    return;
  }
  if (options_.size_cache) {
    if (auto it = cache_.find({target, log}); it != cache_.end()) {
      op.phase = Phase::append;
      op.element_size = it->second.element_size;
      op.outcome.cache_hit = true;
    }
  }
  ops_.emplace(rid, std::move(op));

  if (options_.connection_setup && !connected_.count(target)) {
    connected_.insert(target);
    const Duration setup = net_.sample_round_trip(self_, target);
    std::weak_ptr<bool> alive = alive_;
    sim.schedule_after(
        setup, "connect",
        [this, alive, rid] {
          if (auto a = alive.lock(); a && *a) {
            if (ops_.count(rid)) {
              auto& op = ops_.at(rid);
              if (op.phase == Phase::append) {
                start_append_phase(rid);
              } else {
                transmit(rid);
              }
            }
          }
        },
        self_ + "->" + target);
    return;
  }
  if (ops_.at(rid).phase == Phase::append) {
    start_append_phase(rid);
  } else {
    transmit(rid);
  }
}

void SimClient::start_append_phase(std::uint64_t rid) {
  auto& op = ops_.at(rid);
  op.phase = Phase::append;
  op.phase_attempt = 0;
  if (op.payload.size() > op.element_size) {
    finish(rid, Errc::payload_too_large,
           "payload of " + std::to_string(op.payload.size()) + " bytes exceeds element size " +
               std::to_string(op.element_size));
    return;
  }
  transmit(rid);
}

void SimClient::transmit(std::uint64_t rid) {
  auto& op = ops_.at(rid);
  auto& sim = net_.simulator();
  Bytes frame;
  if (op.phase == Phase::size) {
    frame = encode(SizeRequest{rid, op.log});
  } else {
    frame = encode(AppendRequest{rid, op.id, op.log, op.element_size, op.payload});
  }
  if (op.outcome.attempts > 0) ++stats_.retransmissions;
  ++op.outcome.attempts;
  // Send before arming the timer so a reply landing exactly at the
  // deadline wins the tie.
  send_(op.target, std::move(frame));
  const Duration wait = options_.retry.timeout(op.phase_attempt);
  std::weak_ptr<bool> alive = alive_;
  op.timer = sim.schedule_after(
      wait, "timeout",
      [this, alive, rid] {
        if (auto a = alive.lock(); a && *a) on_timeout(rid);
      },
      self_ + "->" + op.target);
}

void SimClient::on_timeout(std::uint64_t rid) {
  auto it = ops_.find(rid);
  if (it == ops_.end()) return;
  auto& op = it->second;
  op.timer = 0;
  if (options_.retry.max_attempts && op.outcome.attempts >= *options_.retry.max_attempts) {
    finish(rid, Errc::delivery_abandoned,
           "gave up after " + std::to_string(op.outcome.attempts) + " attempts");
    return;
  }
  ++op.phase_attempt;
  transmit(rid);
}

void SimClient::on_reply(const NodeId& from, const Frame& frame) {
  const auto rid = request_id_of(frame);
  auto it = ops_.find(rid);
  if (it == ops_.end() || it->second.target != from) {
    ++stats_.stale_replies;
    return;
  }
  auto& op = it->second;
  auto& sim = net_.simulator();

  if (const auto* s = std::get_if<SizeReply>(&frame)) {
    if (op.phase != Phase::size) {
      ++stats_.stale_replies;
      return;
    }
    if (op.timer != 0) sim.cancel(op.timer);
    op.timer = 0;
    ++op.outcome.round_trips;
    if (s->status != Status::ok) {
      finish(rid, to_errc(s->status), "size request: " + to_string(s->status));
      return;
    }
    op.element_size = s->element_size;
    if (options_.size_cache) cache_[{op.target, op.log}] = {s->element_size, sim.now()};
    start_append_phase(rid);
    return;
  }

  const auto* a = std::get_if<AppendReply>(&frame);
  if (a == nullptr || op.phase != Phase::append) {
    ++stats_.stale_replies;
    return;
  }
  if (a->status == Status::storage_failure) {
    // Transient on the server; the pending timeout retries.
    ++stats_.stale_replies;
    return;
  }
  if (op.timer != 0) sim.cancel(op.timer);
  op.timer = 0;
  ++op.outcome.round_trips;
  if (a->status == Status::ok) {
    op.outcome.seq = a->seq;
    finish(rid, std::nullopt, {});
    return;
  }
  if (a->status == Status::size_mismatch) cache_.erase({op.target, op.log});
  finish(rid, to_errc(a->status), "append: " + to_string(a->status));
}

void SimClient::finish(std::uint64_t rid, std::optional<Errc> error, std::string message) {
  auto node = ops_.extract(rid);
  auto& op = node.mapped();
  if (op.timer != 0) net_.simulator().cancel(op.timer);
  op.outcome.error = error;
  op.outcome.message = std::move(message);
  op.outcome.finished = net_.simulator().now();
  if (error) {
    ++stats_.failed;
  } else {
    ++stats_.succeeded;
  }
  if (op.done) op.done(op.outcome);
}

AppendOutcome SimClient::append_sync(const NodeId& target, const std::string& log,
                                     const MessageId& id, Bytes payload, Duration deadline) {
  auto& sim = net_.simulator();
  std::optional<AppendOutcome> result;
  remote_append(target, log, id, std::move(payload),
                [&result](const AppendOutcome& o) { result = o; });
  sim.run_until([&] { return result.has_value(); }, sim.now() + deadline);
  if (!result) {
    AppendOutcome o;
    o.error = Errc::delivery_abandoned;
    o.message = "no outcome before deadline";
    o.message_id = id;
    return o;
  }
  return *result;
}

SimEndpoint::SimEndpoint(netsim::Network& net, NodeId id, ClientOptions options)
    : net_(net),
      id_(id),
      client_(net, id, options, [this](const NodeId& to, Bytes frame) {
        net_.send(id_, to, std::move(frame));
      }) {
  net_.set_receiver(id_, [this](const NodeId& from, Bytes frame) { receive(from, std::move(frame)); });
}

SimEndpoint::~SimEndpoint() { net_.set_receiver(id_, {}); }

void SimEndpoint::receive(const NodeId& from, Bytes bytes) {
  Frame frame;
  try {
    frame = decode(bytes);
  } catch (const Error&) {
    ++undeliverable_;
    return;
  }
  if (!is_request(frame)) {
    client_.on_reply(from, frame);
    return;
  }
  if (server_ == nullptr) {
    ++undeliverable_;
    return;
  }
  Bytes reply;
  if (const auto* s = std::get_if<SizeRequest>(&frame)) {
    reply = encode(server_->handle(*s));
  } else {
    reply = encode(server_->handle(std::get<AppendRequest>(frame)));
  }
  // A server that crashed while handling the request never answers.
  if (net_.is_up(id_) && net_.reachable(id_, from)) net_.send(id_, from, std::move(reply));
}

}  // namespace fabric::transport
