/*
 * src/transport/socket.cpp
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

#include "fabric/transport/socket.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace fabric::transport {

namespace {

[[noreturn]] void sys_fail(const std::string& what) {
  throw Error(Errc::storage_failure, what + ": " + std::strerror(errno));
}

bool write_all(int fd, std::span<const std::uint8_t> bytes) {
  std::size_t off = 0;
  while (off < bytes.size()) {
    const auto n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return false;
    off += static_cast<std::size_t>(n);
  }
  return true;
}

// Reads until a frame is complete; nullopt on EOF or error.
std::optional<Bytes> read_frame(int fd, FrameAssembler& assembler) {
  std::uint8_t buf[4096];
  while (true) {
    if (auto f = assembler.next()) return f;
    const auto n = ::recv(fd, buf, sizeof(buf), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) return std::nullopt;
    assembler.feed(std::span<const std::uint8_t>(buf, static_cast<std::size_t>(n)));
  }
}

}  // namespace

TcpServer::TcpServer(LogServer& server) : server_(server) {}

TcpServer::~TcpServer() { stop(); }

void TcpServer::start(std::uint16_t port) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) sys_fail("socket");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(port);
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) sys_fail("bind");
  if (::listen(listen_fd_, 16) != 0) sys_fail("listen");
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
  running_ = true;
  acceptor_ = std::thread([this] { accept_loop(); });
}

void TcpServer::stop() {
  if (!running_.exchange(false)) return;
  ::shutdown(listen_fd_, SHUT_RDWR);
  ::close(listen_fd_);
  if (acceptor_.joinable()) acceptor_.join();
  {
    std::lock_guard lock(mu_);
    for (int fd : conns_) ::shutdown(fd, SHUT_RDWR);
  }
  for (auto& t : workers_) {
    if (t.joinable()) t.join();
  }
  workers_.clear();
}

void TcpServer::accept_loop() {
  while (running_) {
    const int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (errno == EINTR) continue;
      return;
    }
    int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
    std::lock_guard lock(mu_);
    conns_.push_back(fd);
    workers_.emplace_back([this, fd] { serve(fd); });
  }
}

void TcpServer::serve(int fd) {
  FrameAssembler assembler;
  try {
    while (auto frame = read_frame(fd, assembler)) {
      auto reply = server_.handle(*frame);
      // An undecodable request leaves the stream unsynchronised.
      if (!reply || !write_all(fd, *reply)) break;
    }
  } catch (const Error&) {
  }
  std::lock_guard lock(mu_);
  conns_.remove(fd);
  ::close(fd);
}

TcpClient::TcpClient(const std::string& host, std::uint16_t port, bool size_cache)
    : size_cache_(size_cache) {
  fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (fd_ < 0) sys_fail("socket");
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    ::close(fd_);
    throw Error(Errc::invalid_argument, "bad IPv4 address '" + host + "'");
  }
  if (::connect(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    const int err = errno;
    ::close(fd_);
    errno = err;
    sys_fail("connect");
  }
  int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
}

TcpClient::~TcpClient() {
  if (fd_ >= 0) ::close(fd_);
}

Frame TcpClient::exchange(const Frame& request) {
  if (!write_all(fd_, encode(request))) sys_fail("send");
  auto bytes = read_frame(fd_, assembler_);
  if (!bytes) throw Error(Errc::storage_failure, "connection closed by server");
  ++round_trips_;
  auto reply = decode(*bytes);
  if (request_id_of(reply) != request_id_of(request)) {
    throw Error(Errc::decode_error, "reply for a different request");
  }
  return reply;
}

std::uint32_t TcpClient::element_size(const std::string& log) {
  if (size_cache_) {
    if (auto it = cache_.find(log); it != cache_.end()) return it->second;
  }
  auto reply = exchange(SizeRequest{next_request_++, log});
  const auto* s = std::get_if<SizeReply>(&reply);
  if (s == nullptr) throw Error(Errc::decode_error, "expected a size reply");
  if (s->status != Status::ok) throw Error(to_errc(s->status), log + ": " + to_string(s->status));
  if (size_cache_) cache_[log] = s->element_size;
  return s->element_size;
}

Seq TcpClient::append(const std::string& log, const MessageId& id,
                      std::span<const std::uint8_t> payload) {
  const auto size = element_size(log);
  if (payload.size() > size) throw Error(Errc::payload_too_large, log + ": payload too large");
  auto reply = exchange(
      AppendRequest{next_request_++, id, log, size, Bytes(payload.begin(), payload.end())});
  const auto* a = std::get_if<AppendReply>(&reply);
  if (a == nullptr) throw Error(Errc::decode_error, "expected an append reply");
  if (a->status != Status::ok) {
    if (a->status == Status::size_mismatch) cache_.erase(log);
    throw Error(to_errc(a->status), log + ": " + to_string(a->status));
  }
  return a->seq;
}

}  // namespace fabric::transport
