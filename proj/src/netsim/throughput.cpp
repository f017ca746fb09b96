/*
 * src/netsim/throughput.cpp
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

#include "fabric/netsim/throughput.hpp"

#include <algorithm>
#include <cmath>

#include "fabric/common/error.hpp"

namespace fabric::netsim {

void validate_slice(const SliceConfig& slice) {
  if (slice.slice_id < 1 || slice.slice_id > 9) {
    throw Error(Errc::invalid_slice, "slice_id " + std::to_string(slice.slice_id) +
                                         " outside 1..9");
  }
  if (!(slice.prb_fraction > 0.0 && slice.prb_fraction <= 1.0)) {
    throw Error(Errc::invalid_slice, "prb_fraction must be in (0, 1]");
  }
}

double mean_slice_capacity(double base_capacity_mbps, const SliceConfig& slice,
                           double ue_efficiency) {
  validate_slice(slice);
  if (base_capacity_mbps <= 0.0) throw Error(Errc::invalid_slice, "link has no radio capacity");
  if (ue_efficiency <= 0.0) throw Error(Errc::invalid_slice, "ue efficiency must be positive");
  return slice.prb_fraction * base_capacity_mbps * ue_efficiency;
}

double sample_bounded(double mean, double sd, double support_sds, std::mt19937_64& rng) {
  if (mean <= 0.0) return 0.0;
  if (sd <= 0.0) return mean;
  // Beta(a, b) on [0, upper] needs mean * (upper - mean) > sd^2.
  sd = std::min(sd, mean * support_sds / 1.5);
  const double upper = mean + support_sds * sd;
  const double m = mean / upper;
  const double v = (sd * sd) / (upper * upper);
  const double total = m * (1.0 - m) / v - 1.0;
  std::gamma_distribution<double> ga(m * total, 1.0);
  std::gamma_distribution<double> gb((1.0 - m) * total, 1.0);
  const double x = ga(rng);
  const double y = gb(rng);
  return upper * x / (x + y);
}

double sample_slice_capacity(double base_capacity_mbps, const SliceConfig& slice,
                             double ue_efficiency, const ThroughputModel& model,
                             std::mt19937_64& rng) {
  const double mean = mean_slice_capacity(base_capacity_mbps, slice, ue_efficiency);
  return sample_bounded(mean, model.sd_mbps, model.support_sds, rng);
}

EfficiencyFit fit_ue_efficiency(
    const std::map<NodeId, std::vector<std::pair<double, double>>>& points) {
  if (points.empty()) throw Error(Errc::invalid_argument, "no calibration points");
  std::map<NodeId, double> slope;
  for (const auto& [ue, pts] : points) {
    double fy = 0, ff = 0;
    for (const auto& [f, y] : pts) {
      fy += f * y;
      ff += f * f;
    }
    if (ff <= 0) throw Error(Errc::invalid_argument, "calibration for " + ue + " is degenerate");
    slope[ue] = fy / ff;
  }
  EfficiencyFit fit;
  for (const auto& [ue, k] : slope) fit.base_capacity_mbps = std::max(fit.base_capacity_mbps, k);
  for (const auto& [ue, k] : slope) fit.efficiency[ue] = k / fit.base_capacity_mbps;
  return fit;
}

}  // namespace fabric::netsim
