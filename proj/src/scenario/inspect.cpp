/*
 * src/scenario/inspect.cpp
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

#include "fabric/scenario/inspect.hpp"

#include <fstream>
#include <iterator>

#include "fabric/common/error.hpp"
#include "json.hpp"

namespace fabric::scenario {

namespace {

std::string to_hex(const Bytes& b) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (auto byte : b) {
    out += kDigits[byte >> 4];
    out += kDigits[byte & 0xf];
  }
  return out;
}

}  // namespace

std::string Inspection::diagnosis() const {
  if (recovery.torn_record_discarded) return "torn-record-discarded";
  if (recovery.adopted_unacknowledged_record) return "unacknowledged-record-adopted";
  return "clean";
}

std::string Inspection::to_json() const {
  nlohmann::ordered_json j;
  j["schema"] = 1;
  j["file_bytes"] = file_bytes;
  j["header"] = {{"name", header.name},
                 {"element_size", header.element_size},
                 {"capacity", header.capacity},
                 {"next_seq", header.next_seq},
                 {"earliest_seq", header.earliest_seq},
                 {"dedup_capacity", header.dedup_capacity}};
  j["diagnosis"] = diagnosis();
  if (recovery.torn_record_discarded) j["discarded_seq"] = recovery.discarded_seq;
  auto entries_j = nlohmann::ordered_json::array();
  for (const auto& e : entries) {
    entries_j.push_back({{"seq", e.seq},
                         {"message_id", e.message_id.hex()},
                         {"created_at_us", e.created_at.count()},
                         {"size", e.payload.size()},
                         {"payload_hex", to_hex(e.payload)}});
  }
  j["entries"] = std::move(entries_j);
  return j.dump(2) + "\n";
}

Inspection inspect_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, path.string() + ": cannot open");
  Bytes contents((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  Inspection out;
  out.file_bytes = contents.size();
  auto device = std::make_shared<logstore::MemoryDevice>(std::move(contents));
  std::unique_ptr<logstore::Log> log;
  try {
    log = logstore::Log::recover(device);
  } catch (const Error& e) {
    if (e.code() != Errc::corrupt_header) throw;
    throw Error(Errc::corrupt_header, path.string() + ": " + e.detail());
  }
  out.header = log->header();
  out.recovery = log->recovery_report();
  if (out.header.next_seq > out.header.earliest_seq) {
    out.entries = log->scan(out.header.earliest_seq, out.header.next_seq - 1).entries;
  }
  return out;
}

}  // namespace fabric::scenario
