/*
 * include/fabric/netsim/network.hpp
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

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fabric/common/bytes.hpp"
#include "fabric/common/time.hpp"
#include "fabric/netsim/simulator.hpp"
#include "fabric/netsim/throughput.hpp"

namespace fabric::netsim {

struct Interval {
  SimTime start{0};
  SimTime end{0};
  bool contains(SimTime t) const { return t >= start && t < end; }
};

/// A network edge. Undirected unless `directed`, in which case it only
/// carries frames from `a` to `b`.
struct LinkSpec {
  NodeId a;
  NodeId b;
  double latency_mean_ms = 0.0;
  double latency_sd_ms = 0.0;
  double loss_prob = 0.0;
  /// Probability a delivered frame is delivered a second time.
  double dup_prob = 0.0;
  /// Extra uniform [0, jitter] delay per frame; reorders back-to-back frames.
  double reorder_jitter_ms = 0.0;
  /// 0 means no serialization delay is modelled.
  double capacity_mbps = 0.0;
  std::vector<Interval> partitions;
  bool directed = false;
};

struct NodeOptions {
  /// Relative radio efficiency of a UE's modem; 1.0 for the best device.
  double ue_efficiency = 1.0;
};

/// Latency samples never go below this floor.
inline constexpr Duration kMinLatency{100};

struct HopResult {
  bool dropped = false;
  std::string reason;
  SimTime arrival{0};
  Duration latency{0};
  Duration serialization{0};
};

struct SendResult {
  bool dropped = false;
  std::string reason;
  SimTime arrival{0};
  int copies = 0;
};

struct NetworkStats {
  std::uint64_t frames_sent = 0;
  std::uint64_t frames_dropped = 0;
  std::uint64_t frames_duplicated = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t bytes_delivered = 0;
};

struct TrialRequest {
  NodeId ue;
  SliceConfig slice;
};

class Network {
 public:
  using Receiver = std::function<void(const NodeId& from, Bytes frame)>;

  explicit Network(Simulator& sim, ThroughputModel model = {});

  void add_node(const NodeId& id, NodeOptions options = {});
  void add_link(LinkSpec spec);
  /// Attaches a slice to the radio link between `a` and `b`. The assigned UE
  /// must be one of the endpoints.
  void add_slice(const NodeId& a, const NodeId& b, SliceConfig slice);
  void set_receiver(const NodeId& id, Receiver receiver);
  void set_up(const NodeId& id, bool up);
  bool is_up(const NodeId& id) const;
  bool has_node(const NodeId& id) const { return nodes_.count(id) != 0; }
  void set_ue_efficiency(const NodeId& id, double efficiency);
  void set_link_capacity(const NodeId& a, const NodeId& b, double capacity_mbps);

  /// Routes a frame over the fewest-hop path and schedules its arrival.
  SendResult send(const NodeId& from, const NodeId& to, Bytes frame);

  /// One hop: loss and partition check, then latency + serialization. The
  /// slice (if any) decides the serialization capacity.
  HopResult deliver(std::size_t frame_bytes, const LinkSpec& link, const SliceConfig* slice,
                    SimTime now);

  /// Sum of one sampled one-way latency per hop in each direction.
  Duration sample_round_trip(const NodeId& from, const NodeId& to);

  bool reachable(const NodeId& from, const NodeId& to) const;
  const LinkSpec* find_link(const NodeId& from, const NodeId& to) const;
  const std::vector<SliceConfig>& slices(const NodeId& a, const NodeId& b) const;

  /// Mean capacity a UE gets on its radio link for a given slice.
  double slice_capacity_mean(const NodeId& ue, const SliceConfig& slice) const;

  /// Runs iperf-style trials for several UEs concurrently on the shared
  /// clock: `samples` back-to-back transfers of `interval` each.
  std::vector<std::vector<TransferRecord>> run_throughput_trials(
      const std::vector<TrialRequest>& trials, Duration interval, int samples);
  std::vector<TransferRecord> run_throughput_trial(const NodeId& ue, const SliceConfig& slice,
                                                   Duration interval, int samples);

  const NetworkStats& stats() const { return stats_; }
  Simulator& simulator() { return sim_; }
  const ThroughputModel& throughput_model() const { return model_; }

 private:
  struct Link {
    LinkSpec spec;
    std::vector<SliceConfig> slices;
    std::mt19937_64 rng;
  };
  struct Node {
    NodeOptions options;
    bool up = true;
    Receiver receiver;
    std::vector<std::pair<NodeId, std::size_t>> out;  // neighbour, link index
  };
  struct Hop {
    std::size_t link;
    NodeId from;
    NodeId to;
  };

  std::optional<std::vector<Hop>> route(const NodeId& from, const NodeId& to) const;
  const SliceConfig* slice_for(const Link& link, const NodeId& from, const NodeId& to) const;
  Duration sample_latency(Link& link);
  std::size_t radio_link_of(const NodeId& ue) const;
  Node& node(const NodeId& id);
  const Node& node(const NodeId& id) const;

  Simulator& sim_;
  ThroughputModel model_;
  std::map<NodeId, Node> nodes_;
  std::vector<Link> links_;
  std::mt19937_64 rng_;
  NetworkStats stats_;
  std::uint64_t trial_batches_ = 0;
};

}  // namespace fabric::netsim
