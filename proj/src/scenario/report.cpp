/*
 * src/scenario/report.cpp
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

#include "fabric/scenario/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "fabric/common/error.hpp"
#include "json.hpp"

namespace fabric::scenario {

using ojson = nlohmann::ordered_json;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    throw Error(Errc::invalid_argument, "table " + name + ": row has " + std::to_string(row.size()) +
                                            " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

const Table* MetricsReport::table(const std::string& name) const {
  for (const auto& t : tables) {
    if (t.name == name) return &t;
  }
  return nullptr;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

namespace {

std::string csv_field(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return {};
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return format_number(*d);
  const auto& s = std::get<std::string>(c);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

ojson json_cell(const Cell& c) {
  if (std::holds_alternative<std::monostate>(c)) return nullptr;
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) {
    // JSON has no NaN or infinity.
    if (!std::isfinite(*d)) return format_number(*d);
    return *d;
  }
  return std::get<std::string>(c);
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error(Errc::storage_failure, path.string() + ": write failed");
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + csv_field(row[i]);
    out += '\n';
  }
  return out;
}

std::string MetricsReport::to_json() const {
  ojson j;
  j["schema"] = kSchemaVersion;
  j["scenario"] = scenario;
  j["kind"] = std::string(scenario::to_string(kind));
  j["seed"] = seed;
  j["status"] = {{"completed", completed}, {"ok", ok()}, {"violations", violations}};
  ojson s = ojson::object();
  for (const auto& [k, v] : summary) s[k] = json_cell(v);
  j["summary"] = s;
  ojson tables_j = ojson::object();
  for (const auto& t : tables) {
    ojson tj;
    tj["file"] = t.name + ".csv";
    tj["columns"] = t.columns;
    tj["row_count"] = t.rows.size();
    if (t.in_json) {
      ojson rows = ojson::array();
      for (const auto& row : t.rows) {
        ojson r = ojson::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(r));
      }
      tj["rows"] = std::move(rows);
    }
    tables_j[t.name] = std::move(tj);
  }
  j["tables"] = std::move(tables_j);
  return j.dump(2) + "\n";
}

std::vector<std::filesystem::path> write_report(const MetricsReport& report,
                                                const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::storage_failure, dir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;
  written.push_back(dir / "report.json");
  write_file(written.back(), report.to_json());
  for (const auto& t : report.tables) {
    written.push_back(dir / (t.name + ".csv"));
    write_file(written.back(), to_csv(t));
  }
  return written;
}

std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::invalid_argument, path.string() + ": cannot open");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      const char ch = line[i];
      if (quoted) {
        if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
          field += '"';
          ++i;
        } else if (ch == '"') {
          quoted = false;
        } else {
          field += ch;
        }
      } else if (ch == '"') {
        quoted = true;
      } else if (ch == ',') {
        row.push_back(std::move(field));
        field.clear();
      } else {
        field += ch;
      }
    }
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace fabric::scenario
