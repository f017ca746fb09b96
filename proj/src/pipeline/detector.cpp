/*
 * src/pipeline/detector.cpp
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

#include "fabric/pipeline/detector.hpp"

#include "fabric/common/error.hpp"

namespace fabric::pipeline {

std::vector<double> Window::values(Channel c) const {
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.channel(c));
  return out;
}

void validate_window(const Window& w, std::size_t size, Duration cadence) {
  if (w.records.size() != size) {
    throw Error(Errc::invalid_window, "window holds " + std::to_string(w.records.size()) + " readings, needs " +
                                          std::to_string(size));
  }
  for (std::size_t i = 1; i < w.records.size(); ++i) {
    if (w.records[i].timestamp - w.records[i - 1].timestamp != cadence) {
      throw Error(Errc::invalid_window, "window readings are not contiguous");
    }
  }
}

ChangeAlert compare_samples(std::span<const double> current, std::span<const double> previous, double alpha) {
  if (!(alpha > 0 && alpha < 1)) throw Error(Errc::invalid_argument, "alpha must lie in (0, 1)");
  ChangeAlert a;
  a.results = {welch_t_test(current, previous, alpha), mann_whitney_u(current, previous, alpha),
               ks_two_sample(current, previous, alpha)};
  a.vote = vote(a.results[0].reject, a.results[1].reject, a.results[2].reject);
  return a;
}

ChangeAlert detect_change(const Window& current, const Window& previous, double alpha, Channel channel,
                          std::size_t size, Duration cadence) {
  validate_window(current, size, cadence);
  validate_window(previous, size, cadence);
  if (previous.end() >= current.start()) throw Error(Errc::invalid_window, "windows overlap or are out of order");
  const auto cur = current.values(channel);
  const auto prev = previous.values(channel);
  auto a = compare_samples(cur, prev, alpha);
  a.timestamp = current.end();
  a.channel = channel;
  return a;
}

dataflow::OpFn change_op(double alpha, std::size_t channels, std::size_t size) {
  return [alpha, channels, size](const std::vector<dataflow::Value>& in) {
    const auto& cur = in.at(0).as_fvec();
    const auto& prev = in.at(1).as_fvec();
    if (cur.size() != size * channels || prev.size() != size * channels) {
      throw Error(Errc::invalid_window, "window vector has the wrong length");
    }
    std::vector<double> out;
    bool any = false;
    for (std::size_t c = 0; c < channels; ++c) {
      const auto a = compare_samples(std::span(cur).subspan(c * size, size),
                                     std::span(prev).subspan(c * size, size), alpha);
      for (const auto& r : a.results) {
        out.push_back(r.statistic);
        out.push_back(r.p_value);
      }
      out.push_back(a.vote ? 1.0 : 0.0);
      any = any || a.vote;
    }
    out.push_back(any ? 1.0 : 0.0);
    return dataflow::Value::of(std::move(out));
  };
}

}  // namespace fabric::pipeline
