/*
 * include/fabric/logstore/device.hpp
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
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "fabric/common/bytes.hpp"

namespace fabric::logstore {

/// Random-access byte store underneath a log. Short reads at end of device
/// are reported through the return value, never as errors.
class Device {
 public:
  virtual ~Device() = default;

  virtual std::size_t read(std::uint64_t offset, std::span<std::uint8_t> out) const = 0;
  virtual void write(std::uint64_t offset, std::span<const std::uint8_t> data) = 0;
  virtual std::uint64_t size() const = 0;
  virtual void truncate(std::uint64_t size) = 0;
  virtual void sync() = 0;
  virtual std::string describe() const = 0;
};

/// Volatile device. Simulated nodes keep these across a crash, which is
/// what makes them "persistent" in the simulation.
class MemoryDevice final : public Device {
 public:
  MemoryDevice() = default;
  explicit MemoryDevice(Bytes contents) : data_(std::move(contents)) {}

  std::size_t read(std::uint64_t offset, std::span<std::uint8_t> out) const override;
  void write(std::uint64_t offset, std::span<const std::uint8_t> data) override;
  std::uint64_t size() const override;
  void truncate(std::uint64_t size) override;
  void sync() override {}
  std::string describe() const override { return "memory"; }

  Bytes snapshot() const;

 private:
  mutable std::mutex mu_;
  Bytes data_;
};

/// POSIX file device using pread/pwrite; sync() is fdatasync.
class FileDevice final : public Device {
 public:
  static std::unique_ptr<FileDevice> open(const std::filesystem::path& path, bool create);
  ~FileDevice() override;

  FileDevice(const FileDevice&) = delete;
  FileDevice& operator=(const FileDevice&) = delete;

  std::size_t read(std::uint64_t offset, std::span<std::uint8_t> out) const override;
  void write(std::uint64_t offset, std::span<const std::uint8_t> data) override;
  std::uint64_t size() const override;
  void truncate(std::uint64_t size) override;
  void sync() override;
  std::string describe() const override { return path_.string(); }

 private:
  FileDevice(int fd, std::filesystem::path path) : fd_(fd), path_(std::move(path)) {}

  int fd_;
  std::filesystem::path path_;
};

/// Names logs onto devices. One device per log.
class StorageBackend {
 public:
  virtual ~StorageBackend() = default;

  virtual std::shared_ptr<Device> open(const std::string& name, bool create) = 0;
  virtual bool exists(const std::string& name) const = 0;
  virtual std::vector<std::string> list() const = 0;
};

class MemoryBackend final : public StorageBackend {
 public:
  std::shared_ptr<Device> open(const std::string& name, bool create) override;
  bool exists(const std::string& name) const override;
  std::vector<std::string> list() const override;

  std::shared_ptr<MemoryDevice> device(const std::string& name) const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<MemoryDevice>> devices_;
};

/// One `<escaped-name>.xgflog` file per log inside a directory.
class DirectoryBackend final : public StorageBackend {
 public:
  explicit DirectoryBackend(std::filesystem::path dir);

  std::shared_ptr<Device> open(const std::string& name, bool create) override;
  bool exists(const std::string& name) const override;
  std::vector<std::string> list() const override;

  std::filesystem::path path_for(const std::string& name) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace fabric::logstore
