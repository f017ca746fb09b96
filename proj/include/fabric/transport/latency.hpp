/*
 * include/fabric/transport/latency.hpp
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

#include <vector>

#include "fabric/transport/client.hpp"

namespace fabric::transport {

struct LatencyStats {
  std::size_t n = 0;  // samples kept
  double mean_ms = 0;
  double sd_ms = 0;
  /// Every measured append, including the discarded first one.
  std::vector<double> samples_ms;
};

/// Sends `count` back-to-back appends of `payload_size` bytes and reports
/// the mean and sample SD of the latencies, dropping the first (it carries
/// the connection start-up cost).
LatencyStats measure_latency(SimClient& client, const NodeId& target, const std::string& log,
                             std::size_t payload_size, int count);

/// Mean and n-1 SD of a series; used to recompute reported figures.
LatencyStats summarize(std::vector<double> samples_ms, std::size_t discard);

}  // namespace fabric::transport
