/*
 * src/pilot/cost_model.cpp
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

#include "fabric/pilot/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>

#include "fabric/common/error.hpp"

namespace fabric::pilot {

Duration QueueDelayModel::sample(std::mt19937_64& rng) const {
  double s = 0;
  switch (kind) {
    case Kind::constant:
      s = seconds;
      break;
    case Kind::uniform:
      s = std::uniform_real_distribution<double>(0.0, seconds)(rng);
      break;
    case Kind::lognormal:
      s = std::lognormal_distribution<double>(log_mu, log_sigma)(rng);
      break;
  }
  return from_seconds(std::clamp(s, 0.0, cap_seconds));
}

std::string_view to_string(QueueDelayModel::Kind k) {
  switch (k) {
    case QueueDelayModel::Kind::constant:
      return "constant";
    case QueueDelayModel::Kind::uniform:
      return "uniform";
    case QueueDelayModel::Kind::lognormal:
      return "lognormal";
  }
  return "?";
}

QueueDelayModel::Kind parse_queue_delay_kind(std::string_view s) {
  if (s == "constant") return QueueDelayModel::Kind::constant;
  if (s == "uniform") return QueueDelayModel::Kind::uniform;
  if (s == "lognormal") return QueueDelayModel::Kind::lognormal;
  throw Error(Errc::config_error, "unknown queue delay model '" + std::string(s) + "'");
}

CfdCostModel CfdCostModel::standard() {
  constexpr double kMean64 = 420.39;
  constexpr double kSd64 = 36.29;
  constexpr double kSerial = 0.1;
  CfdCostModel m;
  for (std::uint32_t c : {1u, 2u, 4u, 8u, 16u, 32u, 64u}) {
    const double mean = kMean64 * (kSerial + (1.0 - kSerial) * 64.0 / c);
    m.by_cores[c] = Point{mean, kSd64 * mean / kMean64};
  }
  return m;
}

CfdCostModel::Point CfdCostModel::at(std::uint32_t cores) const {
  if (by_cores.empty()) throw Error(Errc::config_error, "empty cost table");
  if (cores == 0) throw Error(Errc::invalid_argument, "task needs at least one core");
  auto hi = by_cores.lower_bound(cores);
  if (hi != by_cores.end() && hi->first == cores) return hi->second;
  if (hi == by_cores.begin()) return hi->second;
  if (hi == by_cores.end()) return std::prev(hi)->second;
  // Log-linear interpolation in the core count.
  const auto lo = std::prev(hi);
  const double t = (std::log(cores) - std::log(lo->first)) / (std::log(hi->first) - std::log(lo->first));
  return Point{lo->second.mean_s + t * (hi->second.mean_s - lo->second.mean_s),
               lo->second.sd_s + t * (hi->second.sd_s - lo->second.sd_s)};
}

CfdCostModel::Point CfdCostModel::at(std::uint32_t cores, std::uint32_t nodes) const {
  auto p = at(cores);
  const double f = 1.0 + per_extra_node * (std::max<std::uint32_t>(nodes, 1) - 1);
  return Point{p.mean_s * f, p.sd_s * f};
}

Duration CfdCostModel::sample(std::uint32_t cores, std::uint32_t nodes, std::mt19937_64& rng) const {
  const auto p = at(cores, nodes);
  std::normal_distribution<double> law(p.mean_s, p.sd_s);
  for (int i = 0; i < 64; ++i) {
    const double s = law(rng);
    if (s > 0) return from_seconds(s);
  }
  return from_seconds(p.mean_s);
}

}  // namespace fabric::pilot
