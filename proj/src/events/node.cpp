/*
 * src/events/node.cpp
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

#include "fabric/events/node.hpp"

namespace fabric::events {

FabricNode::FabricNode(netsim::Network& net, std::shared_ptr<logstore::StorageBackend> backend,
                       NodeConfig config)
    : net_(net),
      backend_(std::move(backend)),
      config_(std::move(config)),
      endpoint_(net, config_.id, config_.client) {
  build();
}

FabricNode::~FabricNode() {
  endpoint_.set_server(nullptr);
  if (forwarder_) forwarder_->halt();
  endpoint_.client().reset();
}

void FabricNode::build() {
  store_ = std::make_unique<logstore::LogStore>(backend_, config_.log_options);
  store_->recover_all();
  store_->ensure_log(kOutboxLog, config_.outbox_element_size, config_.outbox_capacity);
  server_ = std::make_unique<transport::LogServer>(*store_, [this] { return now(); });
  server_->set_append_hook([this](const std::string& log, Seq seq) { notify(log, seq, true); });
  HandlerEngine::Hooks hooks;
  hooks.now = [this] { return now(); };
  hooks.remote = [this](const AppendEffect& e, const MessageId& id) { park(e, id); };
  hooks.appended = [this](const std::string& log, Seq seq) { notify(log, seq, false); };
  engine_ = std::make_unique<HandlerEngine>(config_.id, *store_, handlers_, std::move(hooks));
  engine_->set_crash_probe(probe_);
  // A binding whose log vanished from storage stays dormant; owners such as
  // the dataflow runtime report the loss when they resume.
  for (const auto& [log, handler] : bindings_) {
    if (store_->find(log) != nullptr) engine_->bind(log, handler);
  }
  forwarder_ = std::make_unique<Forwarder>(config_.id, *store_, endpoint_.client(), config_.forwarder);
  endpoint_.set_server(server_.get());
  up_ = true;
  net_.set_up(config_.id, true);
  run_guarded([this] {
    engine_->resume();
    forwarder_->start();
  });
}

void FabricNode::run_guarded(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const SimulatedCrash&) {
    crash();
  }
}

void FabricNode::bind(const std::string& log, const std::string& handler_id) {
  engine_->bind(log, handler_id);
  bindings_.emplace_back(log, handler_id);
}

void FabricNode::set_crash_probe(CrashProbe probe) {
  probe_ = std::move(probe);
  if (engine_) engine_->set_crash_probe(probe_);
}

logstore::Log& FabricNode::create_log(const std::string& name, std::uint32_t element_size,
                                      std::uint64_t capacity) {
  return store_->create_log(name, element_size, capacity);
}

logstore::Log& FabricNode::ensure_log(const std::string& name, std::uint32_t element_size,
                                      std::uint64_t capacity) {
  return store_->ensure_log(name, element_size, capacity);
}

std::optional<logstore::AppendResult> FabricNode::append(const std::string& log,
                                                         std::span<const std::uint8_t> payload,
                                                         const MessageId& id) {
  if (!up_) return std::nullopt;
  const auto r = store_->get(log).append(payload, id, now());
  if (!r.duplicate) notify(log, r.seq, true);
  return r;
}

bool FabricNode::remote_append(const NodeId& target, const std::string& log, Bytes payload,
                               const MessageId& id) {
  if (!up_) return false;
  park(AppendEffect{target, log, std::move(payload), id}, id);
  return true;
}

void FabricNode::park(const AppendEffect& effect, const MessageId& id) {
  const OutboxRecord rec{effect.target, effect.log, id, effect.payload};
  const auto r = store_->get(kOutboxLog).append(rec.encode(), id, now());
  if (!r.duplicate) notify(kOutboxLog, r.seq, false);
}

void FabricNode::notify(const std::string& log, Seq seq, bool engine) {
  if (!up_) return;
  for (const auto& fn : observers_) fn(log, seq);
  if (log == kOutboxLog) forwarder_->poke();
  if (engine) run_guarded([&] { engine_->on_append(log, seq); });
}

void FabricNode::crash() {
  if (!up_) return;
  up_ = false;
  ++crashes_;
  net_.set_up(config_.id, false);
  net_.simulator().annotate("crash", config_.id);
  engine_->halt();
  forwarder_->halt();
  endpoint_.client().reset();
}

void FabricNode::restart() {
  if (up_) return;
  net_.simulator().annotate("restart", config_.id);
  endpoint_.set_server(nullptr);
  forwarder_.reset();
  engine_.reset();
  server_.reset();
  store_.reset();
  build();
}

}  // namespace fabric::events
