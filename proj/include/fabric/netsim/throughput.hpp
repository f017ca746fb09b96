/*
 * include/fabric/netsim/throughput.hpp
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
#include <string>
#include <utility>
#include <vector>

#include "fabric/common/time.hpp"

namespace fabric::netsim {

using NodeId = std::string;

/// A slice reserves a fixed fraction of the radio link's resource blocks for
/// one UE. Nine profiles, slice k holding k * 10 % of the PRBs.
struct SliceConfig {
  int slice_id = 1;
  double prb_fraction = 0.1;
  NodeId assigned_ue;
};

/// Per-sample throughput noise: a Beta law scaled onto [0, mean + k*sd]
/// with the configured absolute standard deviation. Throughput can't go
/// negative, and a bounded law keeps the spread of small-sample SDs tight.
struct ThroughputModel {
  double sd_mbps = 4.0;
  double support_sds = 3.0;
};

struct TransferRecord {
  std::uint64_t bytes = 0;
  SimTime start{0};
  SimTime end{0};

  double achieved_mbps() const {
    return static_cast<double>(bytes) * 8.0 / static_cast<double>((end - start).count());
  }
};

void validate_slice(const SliceConfig& slice);

/// Mean capacity a UE sees on its slice: fraction x base x efficiency.
double mean_slice_capacity(double base_capacity_mbps, const SliceConfig& slice,
                           double ue_efficiency);

/// One noisy capacity sample around mean_slice_capacity.
double sample_slice_capacity(double base_capacity_mbps, const SliceConfig& slice,
                             double ue_efficiency, const ThroughputModel& model,
                             std::mt19937_64& rng);

/// Draws from a law with the given mean and SD supported on
/// [0, mean + support_sds * sd]. The SD is reduced when the mean is too
/// small for such a law to exist.
double sample_bounded(double mean, double sd, double support_sds, std::mt19937_64& rng);

struct EfficiencyFit {
  double base_capacity_mbps = 0;
  std::map<NodeId, double> efficiency;  // best UE normalised to 1.0
};

/// Least-squares proportional fit of (prb_fraction, mean Mbps) points per
/// UE: slope_u = sum(f*y)/sum(f^2); base = max slope; efficiency = slope/base.
EfficiencyFit fit_ue_efficiency(
    const std::map<NodeId, std::vector<std::pair<double, double>>>& points);

}  // namespace fabric::netsim
