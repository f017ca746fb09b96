/*
 * include/fabric/scenario/inspect.hpp
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

#include <filesystem>
#include <string>

#include "fabric/logstore/log.hpp"

namespace fabric::scenario {

/// What recovery would do to the file, without touching it.
struct Inspection {
  logstore::LogHeader header;  // after recovery
  logstore::RecoveryReport recovery;
  std::vector<logstore::LogEntry> entries;
  std::uint64_t file_bytes = 0;

  std::string diagnosis() const;  // "clean", "torn-record-discarded" or "unacknowledged-record-adopted"
  std::string to_json() const;
};

/// Reads a log file into memory and runs recovery on the copy. A header
/// that fails validation, or a retained record that fails its checksum,
/// throws corrupt_header with the reason.
Inspection inspect_log(const std::filesystem::path& path);

}  // namespace fabric::scenario
