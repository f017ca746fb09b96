/*
 * include/fabric/logstore/log_store.hpp
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

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "fabric/logstore/device.hpp"
#include "fabric/logstore/log.hpp"

namespace fabric::logstore {

/// The set of logs hosted by one node. Log objects are volatile; the
/// backend's devices are the persistent state.
class LogStore {
 public:
  explicit LogStore(std::shared_ptr<StorageBackend> backend, LogOptions defaults = {});

  /// `options` overrides the store defaults for this log only.
  Log& create_log(const std::string& name, std::uint32_t element_size, std::uint64_t capacity,
                  std::optional<LogOptions> options = std::nullopt);
  /// Creates the log unless one with this name is already hosted.
  Log& ensure_log(const std::string& name, std::uint32_t element_size, std::uint64_t capacity,
                  std::optional<LogOptions> options = std::nullopt);

  Log* find(const std::string& name);
  const Log* find(const std::string& name) const;
  Log& get(const std::string& name);
  const Log& get(const std::string& name) const;

  /// Opens every log persisted in the backend. Returns the names recovered.
  std::vector<std::string> recover_all();

  std::vector<std::string> names() const;
  StorageBackend& backend() { return *backend_; }

 private:
  std::shared_ptr<StorageBackend> backend_;
  LogOptions defaults_;
  mutable std::mutex mu_;
  std::map<std::string, std::unique_ptr<Log>> logs_;
};

}  // namespace fabric::logstore
