/*
 * tools/fabric.cpp
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

// fabric: scenario runner, seed sweeps and log inspection.
//
// Exit status: 0 success; 1 the run finished but an invariant failed;
// 2 bad usage or configuration; 3 corrupt log; 4 any other failure.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "fabric/common/error.hpp"
#include "fabric/scenario/inspect.hpp"
#include "fabric/scenario/runner.hpp"

namespace fs = std::filesystem;
using namespace fabric;
using namespace fabric::scenario;

namespace {

enum Exit { kOk = 0, kInvariant = 1, kConfig = 2, kCorrupt = 3, kFailure = 4 };

int report_status(const MetricsReport& r, const fs::path& out) {
  for (const auto& v : r.violations) std::cerr << "invariant violated: " << v << "\n";
  std::cout << r.scenario << " seed " << r.seed << ": " << (r.ok() ? "ok" : "FAILED") << " -> " << out.string()
            << "\n";
  return r.ok() ? kOk : kInvariant;
}

int cmd_run(const std::string& path, std::optional<std::uint64_t> seed, std::optional<std::string> out_dir) {
  auto cfg = load_scenario(path);
  if (seed) cfg.set_seed(*seed);
  const fs::path out = out_dir ? fs::path(*out_dir) : fs::path("out") / cfg.name;
  const auto report = run_scenario(cfg);
  write_report(report, out);
  return report_status(report, out);
}

int cmd_sweep(const std::string& path, const std::string& seeds, std::optional<std::string> out_dir,
              unsigned jobs) {
  auto cfg = load_scenario(path);
  const auto [first, last] = parse_seed_range(seeds);
  const fs::path out = out_dir ? fs::path(*out_dir) : fs::path("out") / (cfg.name + "-sweep");
  const auto sweep = run_sweep(cfg, first, last, jobs);
  write_sweep(sweep, out);
  int status = kOk;
  for (const auto& r : sweep.reports) {
    if (report_status(r, out / ("seed-" + std::to_string(r.seed))) != kOk) status = kInvariant;
  }
  std::cout << "sweep " << first << ".." << last << ": " << (sweep.ok() ? "ok" : "FAILED") << " -> "
            << (out / "sweep.csv").string() << "\n";
  return status;
}

int cmd_inspect(const std::string& path) {
  const auto ins = inspect_log(path);
  std::cout << ins.to_json();
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fabric: sensor-to-HPC pipeline simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Run one scenario and write its report");
  run->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--out", out_dir, "Output directory (default out/<name>)");

  std::string seeds;
  unsigned jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a scenario over a range of seeds");
  sweep->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  sweep->add_option("--seeds", seeds, "Inclusive seed range A..B")->required();
  sweep->add_option("--out", out_dir, "Output directory (default out/<name>-sweep)");
  sweep->add_option("--jobs", jobs, "Parallel runs (default: hardware threads)");

  std::string log_path;
  auto* log = app.add_subcommand("log", "Log file tools");
  log->require_subcommand(1);
  auto* inspect = log->add_subcommand("inspect", "Dump a log file's header and entries as JSON");
  inspect->add_option("path", log_path, "Log file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*run) return cmd_run(scenario_path, seed, out_dir);
    if (*sweep) return cmd_sweep(scenario_path, seeds, out_dir, jobs);
    if (*inspect) return cmd_inspect(log_path);
  } catch (const Error& e) {
    std::cerr << "fabric: " << e.what() << "\n";
    if (e.code() == Errc::config_error || e.code() == Errc::scenario_invalid) return kConfig;
    if (e.code() == Errc::corrupt_header) return kCorrupt;
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "fabric: " << e.what() << "\n";
    return kFailure;
  }
  return kConfig;
}
