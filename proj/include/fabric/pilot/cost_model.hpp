/*
 * include/fabric/pilot/cost_model.hpp
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
#include <map>
#include <random>
#include <string_view>

#include "fabric/common/time.hpp"

namespace fabric::pilot {

/// Batch queue wait before a pilot starts. Samples are clamped to
/// [0, cap], the cap defaulting to 24 h.
struct QueueDelayModel {
  enum class Kind { constant, uniform, lognormal };
  Kind kind = Kind::constant;
  double seconds = 0;          // constant value, or uniform upper bound
  double log_mu = 8.2;         // lognormal: median e^mu s (about 1 h)
  double log_sigma = 1.5;
  double cap_seconds = 24 * 3600.0;

  Duration sample(std::mt19937_64& rng) const;
};

std::string_view to_string(QueueDelayModel::Kind k);
QueueDelayModel::Kind parse_queue_delay_kind(std::string_view s);

/// Runtime of the CFD stub: a normal law per core count, truncated at zero,
/// slowed down by a fixed factor per extra node.
struct CfdCostModel {
  struct Point {
    double mean_s;
    double sd_s;
  };
  std::map<std::uint32_t, Point> by_cores;
  double per_extra_node = 0.15;  // total application time grows off-node

  /// 64 cores at 420.39 +- 36.29 s; other counts follow a serial fraction
  /// of 0.1 around that point, with the same relative spread.
  static CfdCostModel standard();

  Point at(std::uint32_t cores) const;
  Point at(std::uint32_t cores, std::uint32_t nodes) const;
  Duration sample(std::uint32_t cores, std::uint32_t nodes, std::mt19937_64& rng) const;
};

}  // namespace fabric::pilot
