/*
 * src/logstore/device.cpp
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

#include "fabric/logstore/device.hpp"

#include <fcntl.h>
#include <sys/stat.h>
#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstring>

#include "fabric/common/error.hpp"

namespace fabric::logstore {

namespace {

[[noreturn]] void io_failure(const std::string& what) {
  throw Error(Errc::storage_failure, what + ": " + std::strerror(errno));
}

constexpr std::string_view kSuffix = ".xgflog";

std::string escape_name(const std::string& name) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : name) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

std::string unescape_name(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '%' && i + 2 < s.size()) {
      out.push_back(static_cast<char>(std::stoi(std::string(s.substr(i + 1, 2)), nullptr, 16)));
      i += 2;
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

}  // namespace

std::size_t MemoryDevice::read(std::uint64_t offset, std::span<std::uint8_t> out) const {
  std::lock_guard lock(mu_);
  if (offset >= data_.size()) return 0;
  const auto n = std::min<std::uint64_t>(out.size(), data_.size() - offset);
  std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(offset), n, out.begin());
  return n;
}

void MemoryDevice::write(std::uint64_t offset, std::span<const std::uint8_t> data) {
  std::lock_guard lock(mu_);
  if (offset + data.size() > data_.size()) data_.resize(offset + data.size());
  std::copy(data.begin(), data.end(), data_.begin() + static_cast<std::ptrdiff_t>(offset));
}

std::uint64_t MemoryDevice::size() const {
  std::lock_guard lock(mu_);
  return data_.size();
}

void MemoryDevice::truncate(std::uint64_t size) {
  std::lock_guard lock(mu_);
  data_.resize(size);
}

Bytes MemoryDevice::snapshot() const {
  std::lock_guard lock(mu_);
  return data_;
}

std::unique_ptr<FileDevice> FileDevice::open(const std::filesystem::path& path, bool create) {
  const int flags = O_RDWR | O_CLOEXEC | (create ? O_CREAT : 0);
  const int fd = ::open(path.c_str(), flags, 0644);
  if (fd < 0) io_failure("open " + path.string());
  return std::unique_ptr<FileDevice>(new FileDevice(fd, path));
}

FileDevice::~FileDevice() { ::close(fd_); }

std::size_t FileDevice::read(std::uint64_t offset, std::span<std::uint8_t> out) const {
  std::size_t done = 0;
  while (done < out.size()) {
    const auto n = ::pread(fd_, out.data() + done, out.size() - done,
                           static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_failure("pread " + path_.string());
    }
    if (n == 0) break;
    done += static_cast<std::size_t>(n);
  }
  return done;
}

void FileDevice::write(std::uint64_t offset, std::span<const std::uint8_t> data) {
  std::size_t done = 0;
  while (done < data.size()) {
    const auto n = ::pwrite(fd_, data.data() + done, data.size() - done,
                            static_cast<off_t>(offset + done));
    if (n < 0) {
      if (errno == EINTR) continue;
      io_failure("pwrite " + path_.string());
    }
    done += static_cast<std::size_t>(n);
  }
}

std::uint64_t FileDevice::size() const {
  struct stat st {};
  if (::fstat(fd_, &st) != 0) io_failure("fstat " + path_.string());
  return static_cast<std::uint64_t>(st.st_size);
}

void FileDevice::truncate(std::uint64_t size) {
  if (::ftruncate(fd_, static_cast<off_t>(size)) != 0) io_failure("ftruncate " + path_.string());
}

void FileDevice::sync() {
  if (::fdatasync(fd_) != 0) io_failure("fdatasync " + path_.string());
}

std::shared_ptr<Device> MemoryBackend::open(const std::string& name, bool create) {
  std::lock_guard lock(mu_);
  auto it = devices_.find(name);
  if (it != devices_.end()) return it->second;
  if (!create) throw Error(Errc::unknown_log, "no stored log named '" + name + "'");
  auto dev = std::make_shared<MemoryDevice>();
  devices_.emplace(name, dev);
  return dev;
}

bool MemoryBackend::exists(const std::string& name) const {
  std::lock_guard lock(mu_);
  return devices_.count(name) != 0;
}

std::vector<std::string> MemoryBackend::list() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, dev] : devices_) out.push_back(name);
  return out;
}

std::shared_ptr<MemoryDevice> MemoryBackend::device(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = devices_.find(name);
  return it == devices_.end() ? nullptr : it->second;
}

DirectoryBackend::DirectoryBackend(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw Error(Errc::storage_failure, "cannot create " + dir_.string() + ": " + ec.message());
}

std::filesystem::path DirectoryBackend::path_for(const std::string& name) const {
  return dir_ / (escape_name(name) + std::string(kSuffix));
}

std::shared_ptr<Device> DirectoryBackend::open(const std::string& name, bool create) {
  if (!create && !exists(name)) throw Error(Errc::unknown_log, "no stored log named '" + name + "'");
  return FileDevice::open(path_for(name), create);
}

bool DirectoryBackend::exists(const std::string& name) const {
  return std::filesystem::exists(path_for(name));
}

std::vector<std::string> DirectoryBackend::list() const {
  std::vector<std::string> out;
  for (const auto& e : std::filesystem::directory_iterator(dir_)) {
    const auto file = e.path().filename().string();
    if (file.size() > kSuffix.size() && file.ends_with(kSuffix)) {
      out.push_back(unescape_name(std::string_view(file).substr(0, file.size() - kSuffix.size())));
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fabric::logstore
