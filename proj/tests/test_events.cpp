/*
 * tests/test_events.cpp
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

#include <random>

#include "doctest.h"
#include "fabric/events/node.hpp"

using namespace fabric;
using namespace fabric::events;
using logstore::MemoryBackend;

namespace {

Bytes u64_bytes(std::uint64_t v) {
  Bytes b(8);
  store_u64(b, 0, v);
  return b;
}

std::uint64_t as_u64(const Bytes& b) { return load_u64(b, 0); }

MessageId id_of(const std::string& tag, std::uint64_t n) {
  return MessageIdBuilder().add(tag).add(n).finish();
}

struct Single {
  netsim::Simulator sim{1};
  netsim::Network net{sim};
  std::unique_ptr<FabricNode> node;
  Single() {
    net.add_node("n");
    node = std::make_unique<FabricNode>(net, std::make_shared<MemoryBackend>(), NodeConfig{.id = "n"});
  }
};

using Snapshot = std::map<std::string, std::vector<std::tuple<Seq, std::string, Bytes>>>;

Snapshot snapshot(FabricNode& node) {
  Snapshot out;
  for (const auto& name : node.store().names()) {
    const auto& log = node.store().get(name);
    auto& rows = out[name];
    rows.emplace_back(log.next_seq(), "next", Bytes{});
    for (const auto& e : log.scan(log.earliest_seq(), log.next_seq() - 1).entries) {
      rows.emplace_back(e.seq, e.message_id.hex(), e.payload);
    }
  }
  return out;
}

// a --relay--> b --double--> c --sum--> local "sums"
struct Chain {
  netsim::Simulator sim{3};
  netsim::Network net{sim};
  std::map<std::string, std::unique_ptr<FabricNode>> nodes;
  std::uint64_t probes = 0;
  std::optional<std::uint64_t> crash_at;
  std::string crashed;

  explicit Chain(std::optional<std::uint64_t> crash_index = std::nullopt) : crash_at(crash_index) {
    for (auto n : {"a", "b", "c"}) net.add_node(n);
    net.add_link({.a = "a", .b = "b", .latency_mean_ms = 20});
    net.add_link({.a = "b", .b = "c", .latency_mean_ms = 30});
    for (auto n : {"a", "b", "c"}) {
      nodes[n] = std::make_unique<FabricNode>(net, std::make_shared<MemoryBackend>(), NodeConfig{.id = n});
    }
    auto& a = *nodes["a"];
    auto& b = *nodes["b"];
    auto& c = *nodes["c"];
    a.create_log("in", 8, 64);
    b.create_log("mid", 8, 64);
    b.create_log("mid2", 8, 64);
    c.create_log("out", 8, 64);
    c.create_log("sums", 8, 64);
    a.handlers().add("relay", [](const LogEntry& e, HandlerContext& ctx) {
      ctx.remote_append("b", "mid", u64_bytes(as_u64(e.payload) + 1));
    });
    b.handlers().add("double", [](const LogEntry& e, HandlerContext& ctx) {
      ctx.append("mid2", u64_bytes(as_u64(e.payload) * 2));
      ctx.remote_append("c", "out", u64_bytes(as_u64(e.payload) * 2));
    });
    c.handlers().add("sum", [](const LogEntry& e, HandlerContext& ctx) {
      std::uint64_t total = 0;
      for (const auto& x : ctx.tail("out", e.seq, 3)) total += as_u64(x.payload);
      ctx.append("sums", u64_bytes(total));
    });
    a.bind("in", "relay");
    b.bind("mid", "double");
    c.bind("out", "sum");
    for (auto& [name, node] : nodes) {
      FabricNode* self = node.get();
      node->set_crash_probe([this, self](const CrashPoint&) {
        if (crash_at && probes == *crash_at) {
          ++probes;
          crashed = self->id();
          sim.schedule_after(from_seconds(2), "restart", [self] { self->restart(); });
          throw SimulatedCrash();
        }
        ++probes;
      });
    }
  }

  void feed(int count) {
    for (int i = 0; i < count; ++i) {
      sim.schedule_at(from_seconds(i), "feed", [this, i] { push(i); });
    }
  }

  // The sensor keeps its reading until the node takes it.
  void push(int i) {
    if (!nodes["a"]->append("in", u64_bytes(static_cast<std::uint64_t>(i)), id_of("in", static_cast<std::uint64_t>(i)))) {
      sim.schedule_after(from_ms(500), "feed-retry", [this, i] { push(i); });
    }
  }

  std::map<std::string, Snapshot> state() {
    std::map<std::string, Snapshot> out;
    for (auto& [name, node] : nodes) out[name] = snapshot(*node);
    return out;
  }
};

}  // namespace

TEST_CASE("bound handler fires once per append in seq order") {
  Single s;
  s.node->create_log("l", 8, 16);
  std::vector<Seq> seen;
  s.node->handlers().add("h", [&](const LogEntry& e, HandlerContext& ctx) {
    CHECK(ctx.seq() == e.seq);
    CHECK(ctx.log_name() == "l");
    seen.push_back(e.seq);
  });
  s.node->bind("l", "h");
  for (int i = 0; i < 3; ++i) s.node->append("l", u64_bytes(i), id_of("x", i));
  CHECK(seen == std::vector<Seq>{1, 2, 3});
  // A duplicate append fires nothing.
  s.node->append("l", u64_bytes(0), id_of("x", 0));
  CHECK(seen.size() == 3);
  CHECK(s.node->engine().cursor("h", "l") == 3);
}

TEST_CASE("binding an unknown handler fails") {
  Single s;
  s.node->create_log("l", 8, 16);
  try {
    s.node->bind("l", "ghost");
    FAIL("expected unknown-handler");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::unknown_handler);
  }
}

TEST_CASE("every handler bound to a log fires on each append") {
  Single s;
  s.node->create_log("l", 8, 64);
  std::map<std::string, int> calls;
  for (auto id : {"h1", "h2", "h3"}) {
    s.node->handlers().add(id, [&calls, id](const LogEntry&, HandlerContext&) { ++calls[id]; });
  }
  s.node->bind("l", "h1");
  s.node->bind("l", "h2");
  const int n = 7;
  for (int i = 0; i < n; ++i) s.node->append("l", u64_bytes(i), id_of("x", i));
  CHECK(calls["h1"] == n);
  CHECK(calls["h2"] == n);
  CHECK(calls["h3"] == 0);
  CHECK(s.node->engine().stats().invocations == 2 * n);
}

TEST_CASE("binding starts after the current tail") {
  Single s;
  s.node->create_log("l", 8, 16);
  s.node->append("l", u64_bytes(1), id_of("x", 1));
  int calls = 0;
  s.node->handlers().add("h", [&](const LogEntry&, HandlerContext&) { ++calls; });
  s.node->bind("l", "h");
  CHECK(calls == 0);
  s.node->append("l", u64_bytes(2), id_of("x", 2));
  CHECK(calls == 1);
}

TEST_CASE("handler with no effects leaves user logs unchanged") {
  Single s;
  s.node->create_log("l", 8, 16);
  s.node->create_log("other", 8, 16);
  s.node->handlers().add("noop", [](const LogEntry&, HandlerContext&) {});
  s.node->bind("l", "noop");
  s.node->append("l", u64_bytes(5), id_of("x", 5));
  CHECK(s.node->store().get("other").next_seq() == 1);
  CHECK(s.node->store().get(kOutboxLog).next_seq() == 1);
}

TEST_CASE("handler scanning the last six entries appends their summary") {
  Single s;
  s.node->create_log("readings", 8, 64);
  s.node->create_log("summary", 8, 64);
  s.node->handlers().add("sum6", [](const LogEntry& e, HandlerContext& ctx) {
    if (e.seq % 6 != 0) return;
    std::uint64_t total = 0;
    for (const auto& x : ctx.tail("readings", e.seq, 6)) total += as_u64(x.payload);
    ctx.append("summary", u64_bytes(total));
  });
  s.node->bind("readings", "sum6");
  std::mt19937_64 rng(2);
  std::vector<std::uint64_t> values;
  for (int i = 0; i < 18; ++i) {
    values.push_back(rng() % 1000);
    s.node->append("readings", u64_bytes(values.back()), id_of("r", i));
  }
  const auto& summary = s.node->store().get("summary");
  REQUIRE(summary.next_seq() == 4);
  for (int w = 0; w < 3; ++w) {
    std::uint64_t oracle = 0;
    for (int j = 0; j < 6; ++j) oracle += values[static_cast<std::size_t>(w * 6 + j)];
    CHECK(as_u64(summary.read(static_cast<Seq>(w + 1)).payload) == oracle);
  }
}

TEST_CASE("a panicking handler is recorded and the engine moves on") {
  Single s;
  s.node->create_log("l", 8, 16);
  s.node->create_log("ok", 8, 16);
  s.node->handlers().add("fragile", [](const LogEntry& e, HandlerContext& ctx) {
    if (as_u64(e.payload) == 2) throw std::runtime_error("bad reading");
    ctx.append("ok", e.payload);
  });
  s.node->bind("l", "fragile");
  for (int i = 1; i <= 3; ++i) s.node->append("l", u64_bytes(i), id_of("x", i));
  const auto& h = s.node->engine().history();
  REQUIRE(h.size() == 3);
  CHECK(h[1].ok == false);
  CHECK(h[1].error.find("handler-panic") == 0);
  CHECK(s.node->store().get("ok").next_seq() == 3);
  CHECK(s.node->engine().cursor("fragile", "l") == 3);
}

TEST_CASE("appends made by handlers are queued, not nested") {
  Single s;
  for (auto l : {"a", "b", "c"}) s.node->create_log(l, 8, 16);
  std::vector<std::string> order;
  s.node->handlers().add("ab", [&](const LogEntry& e, HandlerContext& ctx) {
    order.push_back("ab:" + std::to_string(e.seq));
    ctx.append("b", e.payload);
    ctx.append("c", e.payload);
  });
  s.node->handlers().add("bc", [&](const LogEntry& e, HandlerContext&) { order.push_back("b:" + std::to_string(e.seq)); });
  s.node->handlers().add("cc", [&](const LogEntry& e, HandlerContext&) { order.push_back("c:" + std::to_string(e.seq)); });
  s.node->bind("a", "ab");
  s.node->bind("b", "bc");
  s.node->bind("c", "cc");
  s.node->append("a", u64_bytes(1), id_of("x", 1));
  CHECK(order == std::vector<std::string>{"ab:1", "b:1", "c:1"});
}

TEST_CASE("effect ids are deterministic per handler, log, seq and index") {
  const auto a = HandlerEngine::effect_id("h", "l", 3, 0);
  CHECK(a == HandlerEngine::effect_id("h", "l", 3, 0));
  CHECK(a != HandlerEngine::effect_id("h", "l", 3, 1));
  CHECK(a != HandlerEngine::effect_id("h", "l", 4, 0));
  CHECK(a != HandlerEngine::effect_id("g", "l", 3, 0));
  CHECK(HandlerEngine::cursor_log_name("h", "l") == "__sys/cursor/h@l");
}

TEST_CASE("outbox records round-trip") {
  OutboxRecord r{"nd", "df/x", id_of("o", 1), Bytes{1, 2, 3}};
  const auto bytes = r.encode();
  CHECK(bytes.size() == OutboxRecord::encoded_size("nd", "df/x", 3));
  const auto back = OutboxRecord::decode(bytes);
  CHECK(back.target == "nd");
  CHECK(back.log == "df/x");
  CHECK(back.id == r.id);
  CHECK(back.payload == r.payload);
}

TEST_CASE("remote effects travel through the outbox and fire remote handlers") {
  Chain w;
  w.feed(10);
  w.sim.advance(from_seconds(60));
  auto& sums = w.nodes["c"]->store().get("sums");
  REQUIRE(sums.next_seq() == 11);
  // out[i] = 2 * (i + 1); sums[k] = sum of the last three outs.
  for (Seq k = 1; k <= 10; ++k) {
    std::uint64_t oracle = 0;
    for (Seq j = (k >= 3 ? k - 2 : 1); j <= k; ++j) oracle += 2 * j;
    CHECK(as_u64(sums.read(k).payload) == oracle);
  }
  CHECK(w.nodes["a"]->forwarder().cursor() == 10);
  CHECK(w.nodes["a"]->forwarder().backlog() == 0);
  CHECK(w.nodes["b"]->store().get("mid2").next_seq() == 11);
}

TEST_CASE("outbox waits out a down target") {
  Chain w;
  w.nodes["b"]->crash();
  w.feed(3);
  w.sim.advance(from_seconds(30));
  CHECK(w.nodes["a"]->forwarder().backlog() == 3);
  CHECK(w.nodes["b"]->store().get("mid").next_seq() == 1);
  w.nodes["b"]->restart();
  w.sim.advance(from_seconds(200));
  CHECK(w.nodes["c"]->store().get("sums").next_seq() == 4);
  CHECK(w.nodes["a"]->client().stats().retransmissions > 0);
}

TEST_CASE("crash-replay at every firing boundary matches the fault-free run") {
  const int feed = 6;
  Chain clean;
  clean.feed(feed);
  clean.sim.advance(from_seconds(300));
  const auto expected = clean.state();
  const auto boundaries = clean.probes;
  REQUIRE(boundaries > 0);
  CHECK(clean.nodes["c"]->store().get("sums").next_seq() == feed + 1);

  for (std::uint64_t k = 0; k < boundaries; ++k) {
    CAPTURE(k);
    Chain w(k);
    w.feed(feed);
    w.sim.advance(from_seconds(300));
    CHECK(!w.crashed.empty());
    CHECK(w.nodes[w.crashed]->crashes() == 1);
    CHECK(w.state() == expected);
  }
}

TEST_CASE("randomized schedules always drain") {
  std::mt19937_64 rng(77);
  for (int round = 0; round < 200; ++round) {
    Single s;
    const int logs = 2 + static_cast<int>(rng() % 4);
    for (int l = 0; l < logs; ++l) s.node->create_log("l" + std::to_string(l), 8, 4096);
    // Edges only go to higher-numbered logs, so the handler graph is acyclic.
    for (int l = 0; l < logs; ++l) {
      const auto name = "h" + std::to_string(l);
      std::vector<int> targets;
      for (int t = l + 1; t < logs; ++t) {
        if (rng() % 2) targets.push_back(t);
      }
      s.node->handlers().add(name, [targets](const LogEntry& e, HandlerContext& ctx) {
        for (int t : targets) ctx.append("l" + std::to_string(t), e.payload);
      });
      s.node->bind("l" + std::to_string(l), name);
    }
    const int appends = 1 + static_cast<int>(rng() % 50);
    for (int i = 0; i < appends; ++i) {
      const auto target = "l" + std::to_string(rng() % static_cast<std::uint64_t>(logs));
      s.sim.schedule_at(from_ms(static_cast<std::int64_t>(rng() % 1000)), "append",
                        [&s, target, i] { s.node->append(target, u64_bytes(i), id_of(target, i)); });
    }
    s.sim.advance(from_seconds(2));
    CHECK(s.node->engine().queued() == 0);
    for (int l = 0; l < logs; ++l) {
      const auto name = "l" + std::to_string(l);
      CHECK(s.node->engine().cursor("h" + std::to_string(l), name) ==
            s.node->store().get(name).next_seq() - 1);
    }
  }
}

TEST_CASE("unprocessed entries are never evicted") {
  Single s;
  s.node->create_log("l", 8, 4);
  bool block = true;
  s.node->handlers().add("slow", [&](const LogEntry&, HandlerContext&) {
    if (block) throw SimulatedCrash();
  });
  s.node->bind("l", "slow");
  s.node->append("l", u64_bytes(1), id_of("x", 1));
  CHECK_FALSE(s.node->up());
  block = false;
  s.node->restart();
  CHECK(s.node->engine().cursor("slow", "l") == 1);
  for (int i = 2; i <= 8; ++i) CHECK(s.node->append("l", u64_bytes(i), id_of("x", i)));
}
