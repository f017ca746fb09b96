/*
 * src/common/error.cpp
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

#include "fabric/common/error.hpp"

namespace fabric {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::name_collision: return "name-collision";
    case Errc::invalid_size: return "invalid-size";
    case Errc::payload_too_large: return "payload-too-large";
    case Errc::storage_failure: return "storage-failure";
    case Errc::seq_evicted: return "seq-evicted";
    case Errc::seq_not_yet_assigned: return "seq-not-yet-assigned";
    case Errc::corrupt_header: return "corrupt-header";
    case Errc::log_full: return "log-full";
    case Errc::unknown_log: return "unknown-log";
    case Errc::size_mismatch: return "size-mismatch";
    case Errc::delivery_abandoned: return "delivery-abandoned";
    case Errc::decode_error: return "decode-error";
    case Errc::route_unreachable: return "route-unreachable";
    case Errc::invalid_slice: return "invalid-slice";
    case Errc::unknown_handler: return "unknown-handler";
    case Errc::handler_panic: return "handler-panic";
    case Errc::type_mismatch: return "type-mismatch";
    case Errc::cycle_detected: return "cycle-detected";
    case Errc::unknown_placement: return "unknown-placement";
    case Errc::double_assignment_conflict: return "double-assignment-conflict";
    case Errc::corrupt_graph_state: return "corrupt-graph-state";
    case Errc::invalid_window: return "invalid-window";
    case Errc::scenario_invalid: return "scenario-invalid";
    case Errc::insufficient_resources: return "insufficient-resources";
    case Errc::invalid_argument: return "invalid-argument";
    case Errc::config_error: return "config-error";
  }
  return "unknown";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), detail_(message) {}

}  // namespace fabric
