/*
 * src/logstore/log_store.cpp
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

#include "fabric/logstore/log_store.hpp"

#include "fabric/common/error.hpp"

namespace fabric::logstore {

LogStore::LogStore(std::shared_ptr<StorageBackend> backend, LogOptions defaults)
    : backend_(std::move(backend)), defaults_(defaults) {}

Log& LogStore::create_log(const std::string& name, std::uint32_t element_size,
                          std::uint64_t capacity, std::optional<LogOptions> options) {
  if (element_size == 0 || capacity == 0) {
    throw Error(Errc::invalid_size, "log '" + name + "' needs element_size >= 1 and capacity >= 1");
  }
  std::lock_guard lock(mu_);
  if (logs_.count(name) != 0 || backend_->exists(name)) {
    throw Error(Errc::name_collision, "log '" + name + "' already exists on this node");
  }
  auto log = Log::create(backend_->open(name, true), name, element_size, capacity,
                         options.value_or(defaults_));
  auto& ref = *log;
  logs_.emplace(name, std::move(log));
  return ref;
}

Log& LogStore::ensure_log(const std::string& name, std::uint32_t element_size,
                          std::uint64_t capacity, std::optional<LogOptions> options) {
  if (auto* log = find(name)) return *log;
  return create_log(name, element_size, capacity, options);
}

Log* LogStore::find(const std::string& name) {
  std::lock_guard lock(mu_);
  auto it = logs_.find(name);
  return it == logs_.end() ? nullptr : it->second.get();
}

const Log* LogStore::find(const std::string& name) const {
  std::lock_guard lock(mu_);
  auto it = logs_.find(name);
  return it == logs_.end() ? nullptr : it->second.get();
}

Log& LogStore::get(const std::string& name) {
  if (auto* log = find(name)) return *log;
  throw Error(Errc::unknown_log, "no log named '" + name + "'");
}

const Log& LogStore::get(const std::string& name) const {
  if (const auto* log = find(name)) return *log;
  throw Error(Errc::unknown_log, "no log named '" + name + "'");
}

std::vector<std::string> LogStore::recover_all() {
  std::vector<std::string> recovered;
  for (const auto& name : backend_->list()) {
    auto log = Log::recover(backend_->open(name, false), defaults_);
    std::lock_guard lock(mu_);
    logs_[name] = std::move(log);
    recovered.push_back(name);
  }
  return recovered;
}

std::vector<std::string> LogStore::names() const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [name, log] : logs_) out.push_back(name);
  return out;
}

}  // namespace fabric::logstore
