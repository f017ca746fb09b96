/*
 * src/events/engine.cpp
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

#include "fabric/events/engine.hpp"

#include <algorithm>
#include <limits>

#include "fabric/common/error.hpp"
#include "fabric/logstore/format.hpp"

namespace fabric::events {

namespace {

constexpr std::uint64_t kCursorCapacity = 16;

logstore::LogOptions cursor_options() {
  logstore::LogOptions o;
  o.dedup_capacity = 64;
  return o;
}

MessageId cursor_id(const std::string& handler_id, const std::string& log, Seq seq) {
  return MessageIdBuilder().add("cursor").add(handler_id).add(log).add(seq).finish();
}

// Resets the draining flag however the drain loop exits.
struct DrainGuard {
  bool& flag;
  explicit DrainGuard(bool& f) : flag(f) { flag = true; }
  ~DrainGuard() { flag = false; }
};

}  // namespace

std::string to_string(Boundary b) {
  switch (b) {
    case Boundary::before_fire: return "before-fire";
    case Boundary::after_effect: return "after-effect";
    case Boundary::after_effects: return "after-effects";
  }
  return "?";
}

HandlerContext::HandlerContext(const NodeId& node, const std::string& handler_id,
                               const std::string& log, Seq seq, const logstore::LogStore& store)
    : node_(node), handler_id_(handler_id), log_(log), seq_(seq), store_(store) {}

std::vector<LogEntry> HandlerContext::tail(const std::string& name, Seq upto, std::size_t n) const {
  if (n == 0 || upto == 0) return {};
  const Seq from = upto >= n ? upto - n + 1 : 1;
  return store_.get(name).scan(from, upto).entries;
}

void HandlerContext::append(const std::string& log, Bytes payload, std::optional<MessageId> id) {
  effects_.push_back(AppendEffect{{}, log, std::move(payload), id});
}

void HandlerContext::remote_append(const NodeId& target, const std::string& log, Bytes payload,
                                   std::optional<MessageId> id) {
  if (target.empty()) throw Error(Errc::invalid_argument, "remote append needs a target node");
  effects_.push_back(AppendEffect{target, log, std::move(payload), id});
}

void HandlerTable::add(const std::string& id, HandlerFn fn) {
  if (id.empty() || !fn) throw Error(Errc::invalid_argument, "handler needs an id and a function");
  fns_[id] = std::move(fn);
}

const HandlerFn* HandlerTable::find(const std::string& id) const {
  auto it = fns_.find(id);
  return it == fns_.end() ? nullptr : &it->second;
}

HandlerEngine::HandlerEngine(NodeId node, logstore::LogStore& store, const HandlerTable& table,
                             Hooks hooks)
    : node_(std::move(node)), store_(store), table_(table), hooks_(std::move(hooks)) {}

std::string HandlerEngine::cursor_log_name(const std::string& handler_id, const std::string& log) {
  auto name = std::string(kSysPrefix) + "cursor/" + handler_id + "@" + log;
  if (name.size() <= logstore::format::kMaxNameLength) return name;
  // Too long for a log name: keep a readable prefix and disambiguate.
  const auto digest = MessageIdBuilder().add("cursor").add(handler_id).add(log).finish().hex().substr(0, 16);
  return name.substr(0, logstore::format::kMaxNameLength - 17) + "~" + digest;
}

MessageId HandlerEngine::effect_id(const std::string& handler_id, const std::string& log, Seq seq,
                                   std::size_t index) {
  return MessageIdBuilder().add("effect").add(handler_id).add(log).add(seq).add(index).finish();
}

void HandlerEngine::bind(const std::string& log, const std::string& handler_id) {
  if (!table_.contains(handler_id)) {
    throw Error(Errc::unknown_handler, "no handler '" + handler_id + "' on " + node_);
  }
  auto& target = store_.get(log);
  for (const auto& b : bindings_) {
    if (b.handler_id == handler_id && b.log == log) {
      throw Error(Errc::invalid_argument, handler_id + " is already bound to " + log);
    }
  }
  BindingState b{handler_id, log, 0};
  const auto cname = cursor_log_name(handler_id, log);
  if (const auto* clog = store_.find(cname); clog && clog->next_seq() > 1) {
    b.cursor = load_u64(clog->read(clog->next_seq() - 1).payload, 0);
  } else {
    b.cursor = target.next_seq() - 1;
    store_.ensure_log(cname, 8, kCursorCapacity, cursor_options());
    commit(b, b.cursor);
  }
  bindings_.push_back(std::move(b));
  update_floor(log);
}

Seq HandlerEngine::cursor(const std::string& handler_id, const std::string& log) const {
  for (const auto& b : bindings_) {
    if (b.handler_id == handler_id && b.log == log) return b.cursor;
  }
  throw Error(Errc::unknown_handler, handler_id + " is not bound to " + log);
}

void HandlerEngine::on_append(const std::string& log, Seq seq) {
  if (halted_) return;
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    if (bindings_[i].log == log) queue_.emplace_back(i, seq);
  }
  if (!draining_) drain();
}

void HandlerEngine::resume() {
  halted_ = false;
  for (std::size_t i = 0; i < bindings_.size(); ++i) {
    const Seq tail = store_.get(bindings_[i].log).next_seq() - 1;
    if (tail > bindings_[i].cursor) queue_.emplace_back(i, tail);
  }
  if (!draining_) drain();
}

void HandlerEngine::halt() {
  halted_ = true;
  queue_.clear();
}

void HandlerEngine::drain() {
  DrainGuard guard(draining_);
  while (!queue_.empty() && !halted_) {
    const auto [binding, seq] = queue_.front();
    queue_.pop_front();
    // Catch up every entry up to `seq`, so a missed notification never
    // leaves a gap.
    while (!halted_ && bindings_[binding].cursor < seq) {
      fire(binding, bindings_[binding].cursor + 1);
    }
  }
}

void HandlerEngine::fire(std::size_t index, Seq seq) {
  auto& b = bindings_[index];
  probe(b, seq, Boundary::before_fire);
  InvocationRecord rec{b.handler_id, b.log, seq, true, {}, 0};
  ++stats_.invocations;
  try {
    const auto entry = store_.get(b.log).read(seq);
    HandlerContext ctx(node_, b.handler_id, b.log, seq, store_);
    (*table_.find(b.handler_id))(entry, ctx);
    auto effects = ctx.take_effects();
    rec.effects = effects.size();
    for (std::size_t i = 0; i < effects.size(); ++i) {
      apply(b, seq, i, effects[i]);
      probe(b, seq, Boundary::after_effect, i);
    }
  } catch (const SimulatedCrash&) {
    throw;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = std::string(to_string(Errc::handler_panic)) + ": " + e.what();
    ++stats_.failures;
  }
  probe(b, seq, Boundary::after_effects);
  history_.push_back(std::move(rec));
  commit(b, seq);
}

void HandlerEngine::apply(BindingState& b, Seq seq, std::size_t index, const AppendEffect& effect) {
  const MessageId id = effect.id.value_or(effect_id(b.handler_id, b.log, seq, index));
  if (!effect.target.empty() && effect.target != node_) {
    ++stats_.remote_effects;
    hooks_.remote(effect, id);
    return;
  }
  ++stats_.local_effects;
  auto& log = store_.get(effect.log);
  const auto r = log.append(effect.payload, id, hooks_.now ? hooks_.now() : SimTime{0});
  if (r.duplicate) {
    ++stats_.duplicate_effects;
    return;
  }
  if (hooks_.appended) hooks_.appended(effect.log, r.seq);
  on_append(effect.log, r.seq);
}

void HandlerEngine::commit(BindingState& b, Seq seq) {
  Bytes payload(8);
  store_u64(payload, 0, seq);
  auto& clog = store_.get(cursor_log_name(b.handler_id, b.log));
  clog.append(payload, cursor_id(b.handler_id, b.log, seq), hooks_.now ? hooks_.now() : SimTime{0});
  b.cursor = seq;
  update_floor(b.log);
}

void HandlerEngine::update_floor(const std::string& log) {
  Seq lowest = std::numeric_limits<Seq>::max();
  for (const auto& b : bindings_) {
    if (b.log == log) lowest = std::min(lowest, b.cursor);
  }
  if (lowest != std::numeric_limits<Seq>::max()) store_.get(log).set_eviction_floor(lowest + 1);
}

void HandlerEngine::probe(const BindingState& b, Seq seq, Boundary stage, std::size_t effect) {
  if (probe_) probe_(CrashPoint{node_, b.handler_id, b.log, seq, stage, effect});
}

}  // namespace fabric::events
