/*
 * include/fabric/transport/socket.hpp
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

#include <atomic>
#include <cstdint>
#include <list>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "fabric/transport/server.hpp"
#include "fabric/transport/wire.hpp"

namespace fabric::transport {

/// Serves a LogServer over TCP with the same framing as the simulated
/// channel. One thread per connection.
class TcpServer {
 public:
  explicit TcpServer(LogServer& server);
  ~TcpServer();
  TcpServer(const TcpServer&) = delete;
  TcpServer& operator=(const TcpServer&) = delete;

  /// Binds to 127.0.0.1:`port` (0 picks a free port) and starts accepting.
  void start(std::uint16_t port = 0);
  void stop();
  std::uint16_t port() const { return port_; }

 private:
  void accept_loop();
  void serve(int fd);

  LogServer& server_;
  int listen_fd_ = -1;
  std::uint16_t port_ = 0;
  std::atomic<bool> running_{false};
  std::thread acceptor_;
  std::mutex mu_;
  std::list<std::thread> workers_;
  std::list<int> conns_;
};

/// Blocking client for TcpServer. The stream is reliable, so there is no
/// retry loop; a dropped connection surfaces as storage-failure.
class TcpClient {
 public:
  TcpClient(const std::string& host, std::uint16_t port, bool size_cache = false);
  ~TcpClient();
  TcpClient(const TcpClient&) = delete;
  TcpClient& operator=(const TcpClient&) = delete;

  std::uint32_t element_size(const std::string& log);
  Seq append(const std::string& log, const MessageId& id, std::span<const std::uint8_t> payload);
  int round_trips() const { return round_trips_; }

 private:
  Frame exchange(const Frame& request);

  int fd_ = -1;
  bool size_cache_;
  std::map<std::string, std::uint32_t> cache_;
  std::uint64_t next_request_ = 1;
  int round_trips_ = 0;
  FrameAssembler assembler_;
};

}  // namespace fabric::transport
