/*
 * src/transport/server.cpp
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

#include "fabric/transport/server.hpp"

namespace fabric::transport {

LogServer::LogServer(logstore::LogStore& store, Clock clock)
    : store_(store), clock_(std::move(clock)) {}

ServerStats LogServer::stats() const {
  std::lock_guard lock(stats_mu_);
  return stats_;
}

std::optional<Bytes> LogServer::handle(std::span<const std::uint8_t> frame) {
  Frame req;
  try {
    req = decode(frame);
  } catch (const Error&) {
    std::lock_guard lock(stats_mu_);
    ++stats_.undecodable;
    return std::nullopt;
  }
  if (auto* s = std::get_if<SizeRequest>(&req)) return encode(handle(*s));
  if (auto* a = std::get_if<AppendRequest>(&req)) return encode(handle(*a));
  // A reply sent to a server is answered with bad-request.
  std::lock_guard lock(stats_mu_);
  ++stats_.errors;
  return encode(AppendReply{request_id_of(req), Status::bad_request, 0});
}

SizeReply LogServer::handle(const SizeRequest& req) {
  SizeReply reply{req.request_id, Status::ok, 0};
  if (const auto* log = store_.find(req.log_name)) {
    reply.element_size = log->element_size();
  } else {
    reply.status = Status::unknown_log;
  }
  std::lock_guard lock(stats_mu_);
  ++stats_.size_requests;
  if (reply.status != Status::ok) ++stats_.errors;
  return reply;
}

AppendReply LogServer::handle(const AppendRequest& req) {
  AppendReply reply{req.request_id, Status::ok, 0};
  bool fresh = false;
  auto* log = store_.find(req.log_name);
  if (log == nullptr) {
    reply.status = Status::unknown_log;
  } else if (req.element_size != log->element_size()) {
    // The client sized its payload for a different element size; storing it
    // could truncate or misframe the record.
    reply.status = Status::size_mismatch;
  } else if (req.payload.size() > log->element_size()) {
    reply.status = Status::payload_too_large;
  } else {
    try {
      const auto r = log->append(req.payload, req.message_id, clock_ ? clock_() : SimTime{0});
      reply.seq = r.seq;
      fresh = !r.duplicate;
    } catch (const Error& e) {
      switch (e.code()) {
        case Errc::log_full: reply.status = Status::log_full; break;
        case Errc::payload_too_large: reply.status = Status::payload_too_large; break;
        default: reply.status = Status::storage_failure; break;
      }
    }
  }
  {
    std::lock_guard lock(stats_mu_);
    ++stats_.append_requests;
    if (reply.status != Status::ok) {
      ++stats_.errors;
    } else if (fresh) {
      ++stats_.appended;
    } else {
      ++stats_.duplicates;
    }
  }
  if (fresh && hook_) hook_(req.log_name, reply.seq);
  return reply;
}

}  // namespace fabric::transport
