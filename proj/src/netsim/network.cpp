/*
 * src/netsim/network.cpp
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

#include "fabric/netsim/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>

#include "fabric/common/error.hpp"

namespace fabric::netsim {

Network::Network(Simulator& sim, ThroughputModel model)
    : sim_(sim), model_(model), rng_(sim.stream("network")) {}

Network::Node& Network::node(const NodeId& id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::invalid_argument, "unknown node '" + id + "'");
  return it->second;
}

const Network::Node& Network::node(const NodeId& id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw Error(Errc::invalid_argument, "unknown node '" + id + "'");
  return it->second;
}

void Network::add_node(const NodeId& id, NodeOptions options) {
  if (id.empty()) throw Error(Errc::invalid_argument, "node id must be non-empty");
  if (!nodes_.emplace(id, Node{options, true, {}, {}}).second) {
    throw Error(Errc::invalid_argument, "duplicate node '" + id + "'");
  }
}

void Network::add_link(LinkSpec spec) {
  node(spec.a);
  node(spec.b);
  if (spec.a == spec.b) throw Error(Errc::invalid_argument, "self-link on '" + spec.a + "'");
  if (spec.latency_mean_ms < 0 || spec.latency_sd_ms < 0 || spec.capacity_mbps < 0 ||
      spec.reorder_jitter_ms < 0) {
    throw Error(Errc::invalid_argument, "negative link parameter on " + spec.a + "-" + spec.b);
  }
  for (double p : {spec.loss_prob, spec.dup_prob}) {
    if (!(p >= 0.0 && p < 1.0)) {
      throw Error(Errc::invalid_argument, "probabilities must be in [0, 1) on " + spec.a + "-" +
                                              spec.b);
    }
  }
  const std::size_t index = links_.size();
  auto rng = sim_.stream("link/" + spec.a + "/" + spec.b + "/" + std::to_string(index));
  node(spec.a).out.emplace_back(spec.b, index);
  if (!spec.directed) node(spec.b).out.emplace_back(spec.a, index);
  links_.push_back(Link{std::move(spec), {}, rng});
}

void Network::add_slice(const NodeId& a, const NodeId& b, SliceConfig slice) {
  validate_slice(slice);
  if (slice.assigned_ue != a && slice.assigned_ue != b) {
    throw Error(Errc::invalid_slice, "slice UE must be an endpoint of " + a + "-" + b);
  }
  for (auto& l : links_) {
    if ((l.spec.a == a && l.spec.b == b) || (l.spec.a == b && l.spec.b == a)) {
      if (l.spec.capacity_mbps <= 0) {
        throw Error(Errc::invalid_slice, "link " + a + "-" + b + " has no radio capacity");
      }
      double total = slice.prb_fraction;
      for (const auto& s : l.slices) {
        if (s.assigned_ue != slice.assigned_ue) total += s.prb_fraction;
      }
      if (total > 1.0 + 1e-9) {
        throw Error(Errc::invalid_slice, "PRB fractions on " + a + "-" + b + " exceed 1.0");
      }
      std::erase_if(l.slices, [&](const SliceConfig& s) { return s.assigned_ue == slice.assigned_ue; });
      l.slices.push_back(slice);
      return;
    }
  }
  throw Error(Errc::invalid_slice, "no link " + a + "-" + b);
}

void Network::set_receiver(const NodeId& id, Receiver receiver) {
  node(id).receiver = std::move(receiver);
}

void Network::set_up(const NodeId& id, bool up) { node(id).up = up; }

bool Network::is_up(const NodeId& id) const { return node(id).up; }

void Network::set_ue_efficiency(const NodeId& id, double efficiency) {
  if (efficiency <= 0) throw Error(Errc::invalid_argument, "ue efficiency must be positive");
  node(id).options.ue_efficiency = efficiency;
}

void Network::set_link_capacity(const NodeId& a, const NodeId& b, double capacity_mbps) {
  for (auto& l : links_) {
    if ((l.spec.a == a && l.spec.b == b) || (l.spec.a == b && l.spec.b == a)) {
      l.spec.capacity_mbps = capacity_mbps;
      return;
    }
  }
  throw Error(Errc::invalid_argument, "no link " + a + "-" + b);
}

std::optional<std::vector<Network::Hop>> Network::route(const NodeId& from,
                                                        const NodeId& to) const {
  if (!nodes_.count(from) || !nodes_.count(to)) return std::nullopt;
  if (from == to) return std::vector<Hop>{};
  std::map<NodeId, std::pair<NodeId, std::size_t>> parent;
  std::deque<NodeId> frontier{from};
  parent[from] = {from, 0};
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    for (const auto& [next, link] : node(cur).out) {
      if (parent.count(next)) continue;
      parent[next] = {cur, link};
      if (next == to) {
        std::vector<Hop> hops;
        for (NodeId at = to; at != from; at = parent[at].first) {
          hops.push_back(Hop{parent[at].second, parent[at].first, at});
        }
        std::reverse(hops.begin(), hops.end());
        return hops;
      }
      frontier.push_back(next);
    }
  }
  return std::nullopt;
}

bool Network::reachable(const NodeId& from, const NodeId& to) const {
  return route(from, to).has_value();
}

const LinkSpec* Network::find_link(const NodeId& from, const NodeId& to) const {
  for (const auto& l : links_) {
    if (l.spec.a == from && l.spec.b == to) return &l.spec;
    if (!l.spec.directed && l.spec.a == to && l.spec.b == from) return &l.spec;
  }
  return nullptr;
}

const std::vector<SliceConfig>& Network::slices(const NodeId& a, const NodeId& b) const {
  for (const auto& l : links_) {
    if ((l.spec.a == a && l.spec.b == b) || (l.spec.a == b && l.spec.b == a)) return l.slices;
  }
  throw Error(Errc::invalid_argument, "no link " + a + "-" + b);
}

const SliceConfig* Network::slice_for(const Link& link, const NodeId& from,
                                      const NodeId& to) const {
  for (const auto& s : link.slices) {
    if (s.assigned_ue == from || s.assigned_ue == to) return &s;
  }
  return nullptr;
}

Duration Network::sample_latency(Link& link) {
  const auto& spec = link.spec;
  double ms = spec.latency_mean_ms;
  if (spec.latency_sd_ms > 0) {
    std::normal_distribution<double> dist(spec.latency_mean_ms, spec.latency_sd_ms);
    ms = dist(link.rng);
    for (int tries = 0; ms < to_ms(kMinLatency) && tries < 16; ++tries) ms = dist(link.rng);
  }
  if (spec.reorder_jitter_ms > 0) {
    ms += std::uniform_real_distribution<double>(0.0, spec.reorder_jitter_ms)(link.rng);
  }
  return std::max(kMinLatency, from_ms(ms));
}

HopResult Network::deliver(std::size_t frame_bytes, const LinkSpec& spec, const SliceConfig* slice,
                           SimTime now) {
  auto it = std::find_if(links_.begin(), links_.end(), [&](const Link& l) {
    return l.spec.a == spec.a && l.spec.b == spec.b;
  });
  if (it == links_.end()) throw Error(Errc::invalid_argument, "link not in topology");
  Link& link = *it;
  HopResult r;
  if (frame_bytes == 0) throw Error(Errc::invalid_argument, "empty frame");
  for (const auto& p : link.spec.partitions) {
    if (p.contains(now)) {
      r.dropped = true;
      r.reason = "partition";
      return r;
    }
  }
  if (link.spec.loss_prob > 0 &&
      std::bernoulli_distribution(link.spec.loss_prob)(link.rng)) {
    r.dropped = true;
    r.reason = "loss";
    return r;
  }
  double capacity = link.spec.capacity_mbps;
  if (slice != nullptr) {
    capacity = mean_slice_capacity(link.spec.capacity_mbps, *slice,
                                   node(slice->assigned_ue).options.ue_efficiency);
  }
  if (capacity > 0) {
    r.serialization =
        from_seconds(static_cast<double>(frame_bytes) * 8.0 / (capacity * 1e6));
  }
  r.latency = sample_latency(link);
  r.arrival = now + r.latency + r.serialization;
  return r;
}

SendResult Network::send(const NodeId& from, const NodeId& to, Bytes frame) {
  SendResult out;
  auto hops = route(from, to);
  if (!hops || hops->empty()) {
    throw Error(Errc::route_unreachable, "no route " + from + " -> " + to);
  }
  ++stats_.frames_sent;
  int copies = 1;
  for (const auto& h : *hops) {
    auto& link = links_[h.link];
    if (link.spec.dup_prob > 0 && std::bernoulli_distribution(link.spec.dup_prob)(link.rng)) {
      ++copies;
    }
  }
  if (copies > 1) stats_.frames_duplicated += static_cast<std::uint64_t>(copies - 1);

  for (int c = 0; c < copies; ++c) {
    SimTime t = sim_.now();
    bool dropped = false;
    for (const auto& h : *hops) {
      auto& link = links_[h.link];
      auto r = deliver(frame.size(), link.spec, slice_for(link, h.from, h.to), t);
      if (r.dropped) {
        dropped = true;
        out.reason = r.reason;
        sim_.annotate("drop", from + "->" + to + " at " + h.from + "->" + h.to + " (" + r.reason + ")");
        break;
      }
      t = r.arrival;
    }
    if (dropped) {
      ++stats_.frames_dropped;
      continue;
    }
    if (out.copies == 0) out.arrival = t;
    ++out.copies;
    sim_.schedule_at(
        t, "deliver",
        [this, from, to, payload = (c + 1 < copies ? frame : std::move(frame))]() mutable {
          auto& dst = node(to);
          if (!dst.up || !dst.receiver) {
            ++stats_.frames_dropped;
            sim_.annotate("drop", from + "->" + to + " (node down)");
            return;
          }
          ++stats_.frames_delivered;
          stats_.bytes_delivered += payload.size();
          dst.receiver(from, std::move(payload));
        },
        from + "->" + to);
  }
  out.dropped = out.copies == 0;
  return out;
}

Duration Network::sample_round_trip(const NodeId& from, const NodeId& to) {
  auto there = route(from, to);
  auto back = route(to, from);
  if (!there || !back) throw Error(Errc::route_unreachable, "no route " + from + " <-> " + to);
  Duration total{0};
  for (const auto& h : *there) total += sample_latency(links_[h.link]);
  for (const auto& h : *back) total += sample_latency(links_[h.link]);
  return total;
}

std::size_t Network::radio_link_of(const NodeId& ue) const {
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const auto& s = links_[i].spec;
    if ((s.a == ue || s.b == ue) && s.capacity_mbps > 0) return i;
  }
  throw Error(Errc::route_unreachable, "UE '" + ue + "' has no radio link");
}

double Network::slice_capacity_mean(const NodeId& ue, const SliceConfig& slice) const {
  const auto& link = links_[radio_link_of(ue)];
  return mean_slice_capacity(link.spec.capacity_mbps, slice, node(ue).options.ue_efficiency);
}

std::vector<std::vector<TransferRecord>> Network::run_throughput_trials(
    const std::vector<TrialRequest>& trials, Duration interval, int samples) {
  if (interval <= Duration{0}) throw Error(Errc::invalid_argument, "trial interval must be > 0");
  if (samples < 1) throw Error(Errc::invalid_argument, "need at least one sample");
  std::map<std::size_t, double> load;
  std::vector<std::size_t> link_of;
  for (const auto& t : trials) {
    if (!nodes_.count(t.ue)) throw Error(Errc::route_unreachable, "unknown UE '" + t.ue + "'");
    validate_slice(t.slice);
    if (t.slice.assigned_ue != t.ue) {
      throw Error(Errc::invalid_slice, "slice is assigned to '" + t.slice.assigned_ue + "'");
    }
    link_of.push_back(radio_link_of(t.ue));
    load[link_of.back()] += t.slice.prb_fraction;
  }
  for (const auto& [link, total] : load) {
    if (total > 1.0 + 1e-9) throw Error(Errc::invalid_slice, "concurrent slices exceed 1.0");
  }

  const auto batch = trial_batches_++;
  std::vector<std::vector<TransferRecord>> out(trials.size());
  const SimTime t0 = sim_.now();
  for (std::size_t i = 0; i < trials.size(); ++i) {
    const auto& t = trials[i];
    const double base = links_[link_of[i]].spec.capacity_mbps;
    const double eff = node(t.ue).options.ue_efficiency;
    auto rng = std::make_shared<std::mt19937_64>(
        sim_.stream("throughput/" + std::to_string(batch) + "/" + t.ue));
    for (int s = 0; s < samples; ++s) {
      const SimTime start = t0 + interval * s;
      sim_.schedule_at(
          start + interval, "throughput-sample",
          [&out, i, start, interval, base, eff, slice = t.slice, rng, this] {
            const double mbps = sample_slice_capacity(base, slice, eff, model_, *rng);
            TransferRecord rec;
            rec.start = start;
            rec.end = start + interval;
            rec.bytes = static_cast<std::uint64_t>(
                std::llround(mbps * 1e6 / 8.0 * to_seconds(interval)));
            out[i].push_back(rec);
          },
          t.ue);
    }
  }
  sim_.advance(t0 + interval * samples);
  return out;
}

std::vector<TransferRecord> Network::run_throughput_trial(const NodeId& ue,
                                                          const SliceConfig& slice,
                                                          Duration interval, int samples) {
  return run_throughput_trials({TrialRequest{ue, slice}}, interval, samples).front();
}

}  // namespace fabric::netsim
