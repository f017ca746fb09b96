/*
 * include/fabric/pipeline/detector.hpp
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
#include <vector>

#include "fabric/dataflow/graph.hpp"
#include "fabric/pipeline/stats.hpp"
#include "fabric/pipeline/telemetry.hpp"

namespace fabric::pipeline {

inline constexpr std::size_t kWindowSize = 6;
inline constexpr double kDefaultAlpha = 0.05;

/// Consecutive readings from one station, `cadence` apart.
struct Window {
  std::vector<TelemetryRecord> records;

  SimTime start() const { return records.front().timestamp; }
  SimTime end() const { return records.back().timestamp; }
  std::vector<double> values(Channel c) const;
};

/// Throws invalid_window unless the window holds exactly `size` readings
/// spaced exactly `cadence` apart.
void validate_window(const Window& w, std::size_t size = kWindowSize, Duration cadence = kCadence);

struct ChangeAlert {
  SimTime timestamp{0};  // end of the current window
  std::array<StatTestResult, 3> results;
  bool vote = false;
  Channel channel = Channel::wind_speed;
};

/// Welch t, Mann-Whitney U and KS on one channel of the two windows, with a
/// majority vote. `previous` must end before `current` starts.
ChangeAlert detect_change(const Window& current, const Window& previous, double alpha = kDefaultAlpha,
                          Channel channel = Channel::wind_speed, std::size_t size = kWindowSize,
                          Duration cadence = kCadence);

/// The three tests plus vote on raw values.
ChangeAlert compare_samples(std::span<const double> current, std::span<const double> previous,
                            double alpha);

/// Dataflow op "change": inputs are two fvec[size * channels] windows laid
/// out channel by channel; output is fvec[7 * channels + 1] holding, per
/// channel, (t, p, U, p, D, p, vote) and finally the OR of the votes.
dataflow::OpFn change_op(double alpha, std::size_t channels, std::size_t size = kWindowSize);

}  // namespace fabric::pipeline
