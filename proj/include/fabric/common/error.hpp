/*
 * include/fabric/common/error.hpp
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

#include <stdexcept>
#include <string>
#include <string_view>

namespace fabric {

enum class Errc {
  // logstore
  name_collision,
  invalid_size,
  payload_too_large,
  storage_failure,
  seq_evicted,
  seq_not_yet_assigned,
  corrupt_header,
  log_full,
  unknown_log,
  // transport
  size_mismatch,
  delivery_abandoned,
  decode_error,
  // netsim
  route_unreachable,
  invalid_slice,
  // events / dataflow
  unknown_handler,
  handler_panic,
  type_mismatch,
  cycle_detected,
  unknown_placement,
  double_assignment_conflict,
  corrupt_graph_state,
  // pipeline / pilot
  invalid_window,
  scenario_invalid,
  insufficient_resources,
  // shared
  invalid_argument,
  config_error,
};

std::string_view to_string(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message);

  Errc code() const noexcept { return code_; }
  /// The message without the leading error code.
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

}  // namespace fabric
