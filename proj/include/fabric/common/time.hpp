/*
 * include/fabric/common/time.hpp
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

#include <chrono>
#include <cmath>
#include <cstdint>

namespace fabric {

// Simulated time is integer microseconds since the start of a run.
using Duration = std::chrono::microseconds;
using SimTime = std::chrono::microseconds;

inline constexpr Duration from_ms(double ms) {
  return Duration{static_cast<std::int64_t>(std::llround(ms * 1000.0))};
}

inline constexpr Duration from_seconds(double s) {
  return Duration{static_cast<std::int64_t>(std::llround(s * 1e6))};
}

inline constexpr double to_ms(Duration d) { return static_cast<double>(d.count()) / 1000.0; }

inline constexpr double to_seconds(Duration d) { return static_cast<double>(d.count()) / 1e6; }

}  // namespace fabric
