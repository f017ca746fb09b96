/*
 * src/transport/latency.cpp
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

#include "fabric/transport/latency.hpp"

#include <cmath>
#include <numeric>

namespace fabric::transport {

LatencyStats summarize(std::vector<double> samples_ms, std::size_t discard) {
  LatencyStats st;
  st.samples_ms = std::move(samples_ms);
  if (st.samples_ms.size() <= discard) return st;
  const auto first = st.samples_ms.begin() + static_cast<std::ptrdiff_t>(discard);
  st.n = static_cast<std::size_t>(st.samples_ms.end() - first);
  st.mean_ms = std::accumulate(first, st.samples_ms.end(), 0.0) / static_cast<double>(st.n);
  if (st.n > 1) {
    double ss = 0;
    for (auto it = first; it != st.samples_ms.end(); ++it) ss += (*it - st.mean_ms) * (*it - st.mean_ms);
    st.sd_ms = std::sqrt(ss / static_cast<double>(st.n - 1));
  }
  return st;
}

LatencyStats measure_latency(SimClient& client, const NodeId& target, const std::string& log,
                             std::size_t payload_size, int count) {
  if (count < 2) throw Error(Errc::invalid_argument, "latency measurement needs count >= 2");
  auto& net = client.network();
  if (!net.reachable(client.self(), target) || !net.reachable(target, client.self())) {
    throw Error(Errc::route_unreachable, "no route " + client.self() + " <-> " + target);
  }
  std::vector<double> samples;
  for (int i = 0; i < count; ++i) {
    Bytes payload(payload_size, static_cast<std::uint8_t>(i));
    const auto out = client.append_sync(target, log, client.fresh_id(), std::move(payload));
    if (!out.ok()) {
      throw Error(*out.error, "latency probe " + std::to_string(i) + " failed: " + out.message);
    }
    samples.push_back(to_ms(out.elapsed()));
  }
  return summarize(std::move(samples), 1);
}

}  // namespace fabric::transport
