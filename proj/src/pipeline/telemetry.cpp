/*
 * src/pipeline/telemetry.cpp
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

#include "fabric/pipeline/telemetry.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fabric/common/error.hpp"

namespace fabric::pipeline {

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::wind_speed:
      return "wind_speed";
    case Channel::wind_direction:
      return "wind_direction";
    case Channel::temperature:
      return "temperature";
    case Channel::humidity:
      return "humidity";
  }
  return "?";
}

Channel parse_channel(std::string_view s) {
  for (auto c : {Channel::wind_speed, Channel::wind_direction, Channel::temperature, Channel::humidity}) {
    if (to_string(c) == s) return c;
  }
  throw Error(Errc::config_error, "unknown channel '" + std::string(s) + "'");
}

double TelemetryRecord::channel(Channel c) const {
  switch (c) {
    case Channel::wind_speed:
      return wind_speed;
    case Channel::wind_direction:
      return wind_direction;
    case Channel::temperature:
      return temperature;
    case Channel::humidity:
      return humidity;
  }
  return 0;
}

Bytes TelemetryRecord::encode() const {
  if (station_id.size() > 32) throw Error(Errc::invalid_argument, "station id longer than 32 bytes");
  ByteWriter w;
  w.i64(timestamp.count()).f64(wind_speed).f64(wind_direction).f64(temperature).f64(humidity);
  w.raw(std::span(reinterpret_cast<const std::uint8_t*>(station_id.data()), station_id.size()));
  w.zeros(32 - station_id.size());
  return w.take();
}

TelemetryRecord TelemetryRecord::decode(std::span<const std::uint8_t> bytes) {
  if (bytes.size() != kEncodedSize) throw Error(Errc::decode_error, "telemetry record must be 72 bytes");
  ByteReader r(bytes);
  TelemetryRecord t;
  t.timestamp = SimTime{r.i64()};
  t.wind_speed = r.f64();
  t.wind_direction = r.f64();
  t.temperature = r.f64();
  t.humidity = r.f64();
  const auto id = r.raw(32);
  const auto end = std::find(id.begin(), id.end(), std::uint8_t{0});
  t.station_id.assign(id.begin(), end);
  return t;
}

double ChannelModel::mean_at(SimTime t) const {
  double m = mean;
  for (const auto& [from, value] : shifts) {
    if (t >= from) m = value;
  }
  return m;
}

const ChannelModel& WeatherModel::channel(Channel c) const {
  switch (c) {
    case Channel::wind_speed:
      return wind_speed;
    case Channel::wind_direction:
      return wind_direction;
    case Channel::temperature:
      return temperature;
    case Channel::humidity:
      break;
  }
  return humidity;
}

ChannelModel& WeatherModel::channel(Channel c) {
  return const_cast<ChannelModel&>(std::as_const(*this).channel(c));
}

std::vector<TelemetryRecord> generate_telemetry(const WeatherModel& model, std::uint64_t seed,
                                                Duration duration, const std::string& station_id,
                                                SimTime start) {
  if (duration < from_seconds(600)) {
    throw Error(Errc::invalid_argument, "telemetry needs at least 600 s to form an interval pair");
  }
  if (model.cadence <= Duration{0}) throw Error(Errc::invalid_argument, "cadence must be positive");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> unit(0.0, 1.0);
  auto draw = [&](const ChannelModel& c, SimTime t) { return c.mean_at(t) + c.noise_sd * unit(rng); };
  std::vector<TelemetryRecord> out;
  for (SimTime t = start; t < start + duration; t += model.cadence) {
    TelemetryRecord r;
    r.timestamp = t;
    r.station_id = station_id;
    r.wind_speed = std::max(0.0, draw(model.wind_speed, t));
    r.wind_direction = std::fmod(std::fmod(draw(model.wind_direction, t), 360.0) + 360.0, 360.0);
    r.temperature = draw(model.temperature, t);
    r.humidity = std::clamp(draw(model.humidity, t), 0.0, 100.0);
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace fabric::pipeline
