/*
 * include/fabric/pipeline/telemetry.hpp
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

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "fabric/common/bytes.hpp"
#include "fabric/common/time.hpp"

namespace fabric::pipeline {

enum class Channel { wind_speed, wind_direction, temperature, humidity };
std::string_view to_string(Channel c);
Channel parse_channel(std::string_view s);

inline constexpr Duration kCadence = from_seconds(300);

/// One weather-station reading. Fixed 72-byte layout: i64 timestamp (us),
/// four f64 channels, 32-byte zero-padded station id.
struct TelemetryRecord {
  SimTime timestamp{0};
  double wind_speed = 0;      // m/s
  double wind_direction = 0;  // degrees
  double temperature = 0;     // C
  double humidity = 0;        // %RH
  std::string station_id;

  static constexpr std::size_t kEncodedSize = 8 + 4 * 8 + 32;

  double channel(Channel c) const;
  Bytes encode() const;
  static TelemetryRecord decode(std::span<const std::uint8_t> bytes);
  bool operator==(const TelemetryRecord&) const = default;
};

/// Piecewise-constant mean plus Gaussian sensor noise.
struct ChannelModel {
  double mean = 0;
  double noise_sd = 0;
  std::vector<std::pair<SimTime, double>> shifts;  // (from, new mean), sorted

  double mean_at(SimTime t) const;
};

struct WeatherModel {
  ChannelModel wind_speed{2.0, 0.5, {}};
  ChannelModel wind_direction{180.0, 15.0, {}};
  ChannelModel temperature{25.0, 0.8, {}};
  ChannelModel humidity{60.0, 3.0, {}};
  Duration cadence = kCadence;

  const ChannelModel& channel(Channel c) const;
  ChannelModel& channel(Channel c);
};

/// Readings at exact cadence over [start, start + duration). Wind speed is
/// floored at zero, direction wrapped into [0, 360), humidity clamped to
/// [0, 100]. Throws invalid_argument for durations under 600 s.
std::vector<TelemetryRecord> generate_telemetry(const WeatherModel& model, std::uint64_t seed,
                                                Duration duration, const std::string& station_id = "cups-1",
                                                SimTime start = SimTime{0});

}  // namespace fabric::pipeline
