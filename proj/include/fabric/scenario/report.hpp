/*
 * include/fabric/scenario/report.hpp
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
#include <string>
#include <variant>
#include <vector>

#include "fabric/scenario/config.hpp"

namespace fabric::scenario {

/// Empty cells render as an empty CSV field and JSON null.
using Cell = std::variant<std::monostate, std::int64_t, double, std::string>;

struct Table {
  std::string name;  // file stem: <name>.csv
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  /// Small tables are repeated inside report.json; raw series are not.
  bool in_json = false;

  void add(std::vector<Cell> row);
};

struct MetricsReport {
  std::string scenario;
  Kind kind = Kind::latency;
  std::uint64_t seed = 0;
  bool completed = false;
  std::vector<std::string> violations;
  std::map<std::string, double> summary;
  std::vector<Table> tables;

  bool ok() const { return completed && violations.empty(); }
  const Table* table(const std::string& name) const;
  std::string to_json() const;
};

/// Shortest decimal string that reads back to the same double.
std::string format_number(double v);
std::string to_csv(const Table& t);

/// Writes report.json and one CSV per table into `dir` (created if needed).
/// Returns the files written, in order.
std::vector<std::filesystem::path> write_report(const MetricsReport& report,
                                                const std::filesystem::path& dir);

/// Parses a CSV written by to_csv (no quoting beyond what to_csv emits).
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path);

}  // namespace fabric::scenario
