/*
 * include/fabric/transport/server.hpp
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
#include <mutex>
#include <optional>
#include <span>
#include <string>

#include "fabric/common/time.hpp"
#include "fabric/logstore/log_store.hpp"
#include "fabric/transport/wire.hpp"

namespace fabric::transport {

struct ServerStats {
  std::uint64_t size_requests = 0;
  std::uint64_t append_requests = 0;
  std::uint64_t appended = 0;
  std::uint64_t duplicates = 0;
  std::uint64_t errors = 0;
  std::uint64_t undecodable = 0;
};

/// Answers size and append requests against a LogStore. Stateless apart
/// from the logs themselves: a retried append is answered from the dedup
/// index with the seq first assigned.
class LogServer {
 public:
  using Clock = std::function<SimTime()>;
  /// Called after a fresh (non-duplicate) remote append is stored.
  using AppendHook = std::function<void(const std::string& log, Seq seq)>;

  explicit LogServer(logstore::LogStore& store, Clock clock = {});

  /// Returns the encoded reply, or nothing when the request could not be
  /// decoded (there is no request id to answer).
  std::optional<Bytes> handle(std::span<const std::uint8_t> frame);
  SizeReply handle(const SizeRequest& req);
  AppendReply handle(const AppendRequest& req);

  void set_append_hook(AppendHook hook) { hook_ = std::move(hook); }
  ServerStats stats() const;
  logstore::LogStore& store() { return store_; }

 private:
  logstore::LogStore& store_;
  Clock clock_;
  AppendHook hook_;
  mutable std::mutex stats_mu_;
  ServerStats stats_;
};

}  // namespace fabric::transport
