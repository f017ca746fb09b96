/*
 * tests/test_dataflow.cpp
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

#include <algorithm>
#include <filesystem>
#include <random>

#include "doctest.h"
#include "fabric/dataflow/runtime.hpp"

using namespace fabric;
using namespace fabric::dataflow;
using events::FabricNode;
using events::NodeConfig;
using logstore::MemoryBackend;

namespace {

template <typename F>
Errc error_code(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::invalid_argument;
}

struct World {
  netsim::Simulator sim{5};
  netsim::Network net{sim};
  std::map<NodeId, std::unique_ptr<FabricNode>> hosts;
  std::uint64_t probes = 0;
  std::optional<std::uint64_t> crash_at;

  explicit World(std::vector<NodeId> names, std::optional<std::uint64_t> crash = std::nullopt)
      : crash_at(crash) {
    for (const auto& n : names) net.add_node(n);
    for (std::size_t i = 0; i + 1 < names.size(); ++i) {
      net.add_link({.a = names[i], .b = names[i + 1], .latency_mean_ms = 15});
    }
    for (const auto& n : names) {
      hosts[n] = std::make_unique<FabricNode>(net, std::make_shared<MemoryBackend>(), NodeConfig{.id = n});
      FabricNode* self = hosts[n].get();
      self->set_crash_probe([this, self](const events::CrashPoint&) {
        if (crash_at && probes++ == *crash_at) {
          sim.schedule_after(from_seconds(3), "restart", [self] { self->restart(); });
          throw events::SimulatedCrash();
        }
        if (!crash_at) ++probes;
      });
    }
  }

  DeployedGraph::Nodes nodes() {
    DeployedGraph::Nodes out;
    for (auto& [n, h] : hosts) out[n] = h.get();
    return out;
  }
};

DataflowGraph add_graph(const NodeId& at = "x", const NodeId& source = "x") {
  DataflowGraph g;
  g.name = "calc";
  g.nodes.push_back({"add", {{"a", Type::int64()}, {"b", Type::int64()}}, Type::int64(), "add"});
  g.externals = {{"lhs", "add", "a", source}, {"rhs", "add", "b", source}};
  g.placement = {{"add", at}};
  return g;
}

// (a + b) on one host, then * c on another.
DataflowGraph two_stage() {
  DataflowGraph g;
  g.name = "two";
  g.nodes.push_back({"add", {{"a", Type::int64()}, {"b", Type::int64()}}, Type::int64(), "add"});
  g.nodes.push_back({"mul", {{"x", Type::int64()}, {"c", Type::int64()}}, Type::int64(), "mul"});
  g.edges = {{"add", "mul", "x"}};
  g.externals = {{"a", "add", "a", "edge"}, {"b", "add", "b", "edge"}, {"c", "mul", "c", "edge"}};
  g.placement = {{"add", "edge"}, {"mul", "repo"}};
  return g;
}

std::size_t df_logs(FabricNode& n) {
  auto names = n.store().names();
  return static_cast<std::size_t>(std::count_if(names.begin(), names.end(), [](const std::string& s) {
    return s.rfind("df/", 0) == 0;
  }));
}

}  // namespace

TEST_CASE("values encode, decode and check their types") {
  const std::vector<Value> vs{Value::of(std::int64_t{-7}), Value::of(2.5), Value::of(Bytes{1, 2}),
                              Value::of(std::vector<double>{1.0, 2.0, 3.0})};
  for (const auto& v : vs) CHECK(Value::decode(v.encode()) == v);
  CHECK(vs[0].fits(Type::int64()));
  CHECK_FALSE(vs[0].fits(Type::float64()));
  CHECK(vs[2].fits(Type::bytes(2)));
  CHECK_FALSE(vs[2].fits(Type::bytes(1)));
  CHECK(vs[3].fits(Type::fvec(3)));
  CHECK_FALSE(vs[3].fits(Type::fvec(4)));
  CHECK(parse_type("fvec[12]") == Type::fvec(12));
  CHECK(parse_type("bytes[64]") == Type::bytes(64));
  CHECK(error_code([] { parse_type("string"); }) == Errc::type_mismatch);
  CHECK(error_code([] { parse_type("fvec[]"); }) == Errc::type_mismatch);
  CHECK(vs[0].digest() != Value::of(std::int64_t{7}).digest());
}

TEST_CASE("one add node deploys two input logs and one output log") {
  World w({"x"});
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  CHECK(df_logs(*w.hosts["x"]) == 3);
  CHECK(w.hosts["x"]->store().find("df/calc/add/in/a") != nullptr);
  CHECK(w.hosts["x"]->store().find("df/calc/add/out") != nullptr);
}

TEST_CASE("compile-time errors") {
  World w({"x"});
  auto g = add_graph();
  g.nodes.push_back({"show", {{"s", Type::bytes(16)}}, Type::bytes(16), "identity"});
  g.edges.push_back({"add", "show", "s"});
  CHECK(error_code([&] { DeployedGraph::deploy(g, w.nodes()); }) == Errc::type_mismatch);

  auto loop = add_graph();
  loop.externals.pop_back();
  loop.edges.push_back({"add", "add", "b"});
  CHECK(error_code([&] { DeployedGraph::deploy(loop, w.nodes()); }) == Errc::cycle_detected);

  DataflowGraph ring;
  ring.name = "ring";
  ring.nodes.push_back({"p", {{"in", Type::int64()}}, Type::int64(), "identity"});
  ring.nodes.push_back({"q", {{"in", Type::int64()}}, Type::int64(), "identity"});
  ring.edges = {{"p", "q", "in"}, {"q", "p", "in"}};
  ring.placement = {{"p", "x"}, {"q", "x"}};
  CHECK(error_code([&] { DeployedGraph::deploy(ring, w.nodes()); }) == Errc::cycle_detected);

  CHECK(error_code([&] { DeployedGraph::deploy(add_graph("nowhere"), w.nodes()); }) ==
        Errc::unknown_placement);

  auto unwired = add_graph();
  unwired.externals.pop_back();
  CHECK(error_code([&] { DeployedGraph::deploy(unwired, w.nodes()); }) == Errc::invalid_argument);
  auto twice = add_graph();
  twice.externals.push_back({"again", "add", "a", "x"});
  CHECK(error_code([&] { DeployedGraph::deploy(twice, w.nodes()); }) == Errc::invalid_argument);
}

TEST_CASE("add fires once both inputs are present") {
  World w({"x"});
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  d->inject("lhs", 0, Value::of(std::int64_t{2}));
  CHECK_FALSE(d->output("add", 0).has_value());
  d->inject("rhs", 0, Value::of(std::int64_t{3}));
  REQUIRE(d->output("add", 0).has_value());
  CHECK(d->output("add", 0)->as_int() == 5);
}

TEST_CASE("re-injecting an identical operand is a no-op") {
  World w({"x"});
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  for (int rep = 0; rep < 3; ++rep) {
    d->inject("lhs", 0, Value::of(std::int64_t{2}));
    d->inject("rhs", 0, Value::of(std::int64_t{3}));
  }
  CHECK(d->outputs("add").size() == 1);
  CHECK(d->firings().size() == 1);
  CHECK(w.hosts["x"]->store().get("df/calc/add/in/a").next_seq() == 2);
}

TEST_CASE("conflicting re-assignment is rejected") {
  World w({"x"});
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  d->inject("lhs", 4, Value::of(std::int64_t{2}));
  CHECK(error_code([&] { d->inject("lhs", 4, Value::of(std::int64_t{9})); }) ==
        Errc::double_assignment_conflict);
  CHECK(error_code([&] { d->inject("lhs", 5, Value::of(1.0)); }) == Errc::type_mismatch);
}

TEST_CASE("a conflict that slips past inject is caught at the port") {
  // Source on another host: inject can't see operands still in flight.
  World w({"src", "x"});
  auto d = DeployedGraph::deploy(add_graph("x", "src"), w.nodes());
  d->inject("lhs", 0, Value::of(std::int64_t{1}));
  d->inject("lhs", 0, Value::of(std::int64_t{2}));
  d->inject("rhs", 0, Value::of(std::int64_t{10}));
  w.sim.advance(from_seconds(10));
  CHECK(d->output("add", 0)->as_int() == 11);
  const auto& hist = w.hosts["x"]->engine().history();
  CHECK(std::count_if(hist.begin(), hist.end(), [](const events::InvocationRecord& r) {
          return !r.ok && r.error.find("double-assignment-conflict") != std::string::npos;
        }) == 1);
}

TEST_CASE("outputs are independent of delivery order") {
  std::mt19937_64 rng(8);
  std::vector<std::pair<std::string, std::uint64_t>> sends;
  for (std::uint64_t i = 0; i < 20; ++i) {
    sends.emplace_back("a", i);
    sends.emplace_back("b", i);
    sends.emplace_back("c", i);
  }
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(sends.begin(), sends.end(), rng);
    World w({"edge", "repo"});
    auto d = DeployedGraph::deploy(two_stage(), w.nodes());
    for (const auto& [port, i] : sends) {
      const auto v = static_cast<std::int64_t>(i) + (port == "a" ? 1 : port == "b" ? 100 : 1000);
      d->inject(port, i, Value::of(v));
    }
    w.sim.advance(from_seconds(60));
    for (std::uint64_t i = 0; i < 20; ++i) {
      const auto n = static_cast<std::int64_t>(i);
      REQUIRE(d->output("mul", i).has_value());
      CHECK(d->output("mul", i)->as_int() == ((n + 1) + (n + 100)) * (n + 1000));
    }
    CHECK(d->outputs("mul").size() == 20);
    for (const auto& f : d->firings()) CHECK(f.operands == 2);
  }
}

TEST_CASE("resume fires enabled nodes and leaves the rest alone") {
  World w({"x"});
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  auto& host = *w.hosts["x"];
  // Store operands directly, bypassing the firing handlers.
  auto put = [&](const std::string& port, std::uint64_t it, std::int64_t v) {
    const Operand op{it, Value::of(v)};
    host.store().get("df/calc/add/in/" + port).append(op.encode(), DeployedGraph::operand_id("calc", "add", port, it, op.value));
  };
  put("a", 0, 2);
  put("b", 0, 3);
  put("a", 1, 7);
  CHECK_FALSE(d->output("add", 0).has_value());
  d->resume();
  CHECK(d->output("add", 0)->as_int() == 5);
  CHECK_FALSE(d->output("add", 1).has_value());
  const auto before = host.store().get("df/calc/add/out").next_seq();
  d->resume();
  CHECK(host.store().get("df/calc/add/out").next_seq() == before);
}

TEST_CASE("resume reports missing operand logs") {
  const auto dir = std::filesystem::temp_directory_path() / "fabric_df_missing";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto backend = std::make_shared<logstore::DirectoryBackend>(dir);
  netsim::Simulator sim{1};
  netsim::Network net{sim};
  net.add_node("x");
  FabricNode host(net, backend, NodeConfig{.id = "x"});
  auto d = DeployedGraph::deploy(add_graph(), DeployedGraph::Nodes{{"x", &host}});
  host.crash();
  std::filesystem::remove(backend->path_for("df/calc/add/in/b"));
  host.restart();
  CHECK(error_code([&] { d->resume(); }) == Errc::corrupt_graph_state);
  std::filesystem::remove_all(dir);
}

TEST_CASE("crash between operand arrival and firing recovers the output") {
  // Boundaries: 0 fire-a, 1 after-effects-a, 2 fire-b (the add), ...
  World w({"x"}, 2);
  auto d = DeployedGraph::deploy(add_graph(), w.nodes());
  CHECK(d->inject("lhs", 0, Value::of(std::int64_t{2})));
  CHECK(d->inject("rhs", 0, Value::of(std::int64_t{3})));
  CHECK_FALSE(w.hosts["x"]->up());
  CHECK_FALSE(d->output("add", 0).has_value());
  w.sim.advance(from_seconds(5));
  CHECK(w.hosts["x"]->up());
  REQUIRE(d->output("add", 0).has_value());
  CHECK(d->output("add", 0)->as_int() == 5);
  CHECK(d->outputs("add").size() == 1);
}

TEST_CASE("embedded nodes delegate to an executor") {
  World w({"edge", "hpc"});
  DataflowGraph g;
  g.name = "sim";
  g.nodes.push_back({"cfd", {{"wind", Type::fvec(2)}}, Type::float64(), "cfd", true});
  g.nodes.push_back({"post", {{"r", Type::float64()}}, Type::float64(), "identity"});
  g.edges = {{"cfd", "post", "r"}};
  g.externals = {{"wind", "cfd", "wind", "edge"}};
  g.placement = {{"cfd", "hpc"}, {"post", "hpc"}};
  auto d = DeployedGraph::deploy(g, w.nodes());
  std::vector<TaskRequest> tasks;
  d->on_task([&](const TaskRequest& t) { tasks.push_back(t); });
  std::vector<std::pair<std::string, std::uint64_t>> outs;
  d->on_output([&](const std::string& n, std::uint64_t it, const Value&) { outs.emplace_back(n, it); });
  d->inject("wind", 3, Value::of(std::vector<double>{1.5, 2.5}));
  w.sim.advance(from_seconds(2));
  REQUIRE(tasks.size() == 1);
  CHECK(tasks[0].kind == "cfd");
  CHECK(tasks[0].iteration == 3);
  CHECK(tasks[0].inputs[0].as_fvec()[1] == 2.5);
  CHECK(d->task("cfd", 3).has_value());
  CHECK(d->complete_task("cfd", 3, Value::of(420.0)));
  CHECK(d->complete_task("cfd", 3, Value::of(420.0)));
  CHECK(d->output("post", 3)->as_float() == 420.0);
  CHECK(outs == std::vector<std::pair<std::string, std::uint64_t>>{{"cfd", 3}, {"post", 3}});
  CHECK(error_code([&] { d->complete_task("post", 3, Value::of(1.0)); }) == Errc::invalid_argument);
}

TEST_CASE("crash at every firing boundary yields one output per iteration") {
  auto run = [](std::optional<std::uint64_t> crash) {
    auto w = std::make_unique<World>(std::vector<NodeId>{"edge", "repo"}, crash);
    auto d = DeployedGraph::deploy(two_stage(), w->nodes());
    for (std::uint64_t i = 0; i < 4; ++i) {
      for (const auto* port : {"a", "b", "c"}) {
        auto go = std::make_shared<std::function<void()>>();
        *go = [d = d.get(), w = w.get(), i, port, go] {
          if (!d->inject(port, i, Value::of(static_cast<std::int64_t>(i + 2)))) {
            w->sim.schedule_after(from_ms(500), "inject-retry", [go] { (*go)(); });
          }
        };
        w->sim.schedule_at(from_seconds(static_cast<double>(i)), "inject", [go] { (*go)(); });
      }
    }
    w->sim.advance(from_seconds(120));
    // Crashes can reorder iterations; each must still appear exactly once.
    std::map<std::uint64_t, std::int64_t> out;
    for (const auto& op : d->outputs("mul")) {
      CHECK(out.emplace(op.iteration, op.value.as_int()).second);
    }
    return std::make_pair(out, w->probes);
  };
  const auto [clean, boundaries] = run(std::nullopt);
  CHECK(clean.size() == 4);
  for (std::uint64_t i = 0; i < 4; ++i) {
    const auto v = static_cast<std::int64_t>(i + 2);
    CHECK(clean.at(i) == (v + v) * v);
  }
  for (std::uint64_t k = 0; k < boundaries; ++k) {
    CAPTURE(k);
    CHECK(run(k).first == clean);
  }
}
