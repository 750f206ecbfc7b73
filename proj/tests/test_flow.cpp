#include <doctest.h>

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "core/flow.hpp"

using namespace itflow;

namespace {

struct FnBehavior final : flow::Behavior {
  std::function<void(flow::StepContext&)> fn;
  std::map<std::string, std::string> params;

  explicit FnBehavior(std::function<void(flow::StepContext&)> f) : fn(std::move(f)) {}
  void process(flow::StepContext& ctx) override {
    if (fn) fn(ctx);
  }
  void set_param(std::string_view name, const std::string& value) override {
    params[std::string(name)] = value;
  }
};

flow::NodeSpec node(std::vector<flow::PortSpec> ins, std::vector<flow::PortSpec> outs,
                    std::function<void(flow::StepContext&)> fn = {}) {
  flow::NodeSpec spec;
  spec.inputs = std::move(ins);
  spec.outputs = std::move(outs);
  spec.behavior = std::make_unique<FnBehavior>(std::move(fn));
  return spec;
}

flow::NodeSpec valuator_source(double value) {
  return node({}, {{"out", PortKind::Valuator}},
              [value](flow::StepContext& ctx) { ctx.emit("out", Valuator{value}); });
}

flow::NodeSpec valuator_sink(std::vector<double>* seen) {
  return node({{"in", PortKind::Valuator}}, {}, [seen](flow::StepContext& ctx) {
    for (const Sample& s : ctx.inputs("in")) seen->push_back(std::get<Valuator>(s).value);
  });
}

scene::SceneState empty_scene;

flow::StepReport run_step(flow::SingleStepModel& model, flow::Dataflow& flow,
                          scene::SceneState& scene, std::span<const DeviceSample> batch = {},
                          flow::StepTap* tap = nullptr) {
  return model.step(flow, batch, 1.0 / 60.0, scene, tap);
}

}  // namespace

TEST_CASE("execution order is topological, ties broken by registration") {
  flow::Dataflow f;
  f.register_node("a", node({}, {{"out", PortKind::Valuator}}));
  f.register_node("b", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
  f.register_node("c", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
  f.register_node("d",
                  node({{"in1", PortKind::Valuator}, {"in2", PortKind::Valuator}}, {}));
  f.register_node("z", node({}, {}));
  f.connect("a", "out", "b", "in");
  f.connect("a", "out", "c", "in");
  f.connect("b", "out", "d", "in1");
  f.connect("c", "out", "d", "in2");
  CHECK(f.topo_order() == std::vector<std::string>{"a", "b", "c", "d", "z"});

  flow::Dataflow g;
  g.register_node("a", node({}, {{"out", PortKind::Valuator}}));
  g.register_node("c", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
  g.register_node("b", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
  g.register_node("d",
                  node({{"in1", PortKind::Valuator}, {"in2", PortKind::Valuator}}, {}));
  g.connect("a", "out", "b", "in");
  g.connect("a", "out", "c", "in");
  g.connect("b", "out", "d", "in1");
  g.connect("c", "out", "d", "in2");
  CHECK(g.topo_order() == std::vector<std::string>{"a", "c", "b", "d"});
}

TEST_CASE("registration rejects duplicate node and port names") {
  flow::Dataflow f;
  f.register_node("a", node({}, {}));
  CHECK_THROWS_WITH_AS(f.register_node("a", node({}, {})), doctest::Contains("DuplicateId"),
                       Error);
  CHECK_THROWS_AS(
      f.register_node("p", node({{"x", PortKind::Valuator}}, {{"x", PortKind::Valuator}})),
      Error);
  CHECK_THROWS_AS(f.register_node("", node({}, {})), Error);
}

TEST_CASE("connect validates endpoints, kinds and acyclicity") {
  flow::Dataflow f;
  f.register_node("src", node({}, {{"out", PortKind::Valuator}}));
  f.register_node("dst", node({{"in", PortKind::Valuator}, {"loc", PortKind::Locator}},
                              {{"out", PortKind::Valuator}}));

  CHECK_THROWS_WITH_AS(f.connect("nope", "out", "dst", "in"), doctest::Contains("UnknownNode"),
                       Error);
  CHECK_THROWS_WITH_AS(f.connect("src", "nope", "dst", "in"), doctest::Contains("UnknownPort"),
                       Error);
  CHECK_THROWS_WITH_AS(f.connect("src", "out", "dst", "loc"), doctest::Contains("TypeMismatch"),
                       Error);

  f.connect("src", "out", "dst", "in");
  REQUIRE(f.edges().size() == 1);

  f.register_node("mid", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
  f.connect("dst", "out", "mid", "in");
  CHECK_THROWS_WITH_AS(f.connect("mid", "out", "dst", "in"), doctest::Contains("CycleCreated"),
                       Error);
  CHECK_THROWS_WITH_AS(f.connect("mid", "out", "mid", "in"), doctest::Contains("CycleCreated"),
                       Error);
  CHECK(f.edges().size() == 2);  // failed connects leave the graph unchanged
}

TEST_CASE("disconnect reports how many edges were removed") {
  flow::Dataflow f;
  f.register_node("a", node({}, {{"out", PortKind::Valuator}}));
  f.register_node("b", node({}, {{"out", PortKind::Valuator}}));
  f.register_node("hub", node({{"in1", PortKind::Valuator}, {"in2", PortKind::Valuator}},
                              {{"out", PortKind::Valuator}}));
  f.register_node("s1", node({{"in", PortKind::Valuator}}, {}));
  f.register_node("s2", node({{"in", PortKind::Valuator}}, {}));
  f.connect("a", "out", "hub", "in1");
  f.connect("b", "out", "hub", "in2");
  f.connect("b", "out", "hub", "in1");
  f.connect("hub", "out", "s1", "in");
  f.connect("hub", "out", "s2", "in");
  f.connect("a", "out", "s1", "in");

  CHECK(f.disconnect_into("hub", "in1") == 2);
  CHECK(f.edges().size() == 4);
  CHECK(f.disconnect_node("hub") == 3);
  CHECK(f.edges().size() == 1);
  CHECK(f.disconnect_node("hub") == 0);
  CHECK_THROWS_AS(f.disconnect_node("nope"), Error);
}

TEST_CASE("samples travel collect-process-send and are cleared afterwards") {
  flow::Dataflow f;
  std::vector<double> seen;
  int source_runs = 0;
  f.register_node("src", node({}, {{"out", PortKind::Valuator}}, [&](flow::StepContext& ctx) {
                    if (++source_runs == 1) {
                      ctx.emit("out", Valuator{1.0});
                      ctx.emit("out", Valuator{2.0});
                    }
                  }));
  f.register_node("sink", valuator_sink(&seen));
  f.connect("src", "out", "sink", "in");

  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  CHECK(seen == std::vector<double>{1.0, 2.0});
  run_step(model, f, empty_scene);
  CHECK(seen.size() == 2);  // nothing lingers from the first step
}

TEST_CASE("an edge overrides registration order so sends arrive the same step") {
  flow::Dataflow f;
  std::vector<double> seen;
  f.register_node("sink", valuator_sink(&seen));
  f.register_node("src", valuator_source(7.0));
  f.connect("src", "out", "sink", "in");
  CHECK(f.topo_order() == std::vector<std::string>{"src", "sink"});
  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  CHECK(seen == std::vector<double>{7.0});
}

TEST_CASE("disabled nodes drop their queued input") {
  flow::Dataflow f;
  std::vector<double> seen;
  int step = 0;
  f.register_node("src", node({}, {{"out", PortKind::Valuator}}, [&](flow::StepContext& ctx) {
                    ctx.emit("out", Valuator{static_cast<double>(step)});
                  }));
  f.register_node("sink", valuator_sink(&seen));
  f.connect("src", "out", "sink", "in");
  f.set_enabled("sink", false);

  flow::SingleStepModel model;
  step = 1;
  run_step(model, f, empty_scene);
  step = 2;
  run_step(model, f, empty_scene);
  CHECK(seen.empty());

  f.set_enabled("sink", true);
  step = 3;
  run_step(model, f, empty_scene);
  CHECK(seen == std::vector<double>{3.0});  // samples from disabled steps are gone
}

TEST_CASE("two upstreams merge in execution order") {
  flow::Dataflow f;
  std::vector<double> seen;
  f.register_node("first", valuator_source(1.0));
  f.register_node("second", valuator_source(2.0));
  f.register_node("sink", valuator_sink(&seen));
  f.connect("second", "out", "sink", "in");  // edge creation order does not matter here
  f.connect("first", "out", "sink", "in");

  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  CHECK(seen == std::vector<double>{1.0, 2.0});
}

TEST_CASE("enable and disable land synchronously") {
  flow::Dataflow f;
  int runs = 0;
  f.register_node("boss", node({}, {}, [&](flow::StepContext& ctx) {
                    ctx.send_control({"worker", flow::ControlVerb::Disable, {}});
                  }));
  f.register_node("worker", node({}, {}, [&](flow::StepContext&) { ++runs; }));

  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  CHECK(runs == 0);  // boss runs first and the disable is already effective
  CHECK(f.at("worker").enabled == false);
}

TEST_CASE("set_param control reaches the behavior") {
  flow::Dataflow f;
  f.register_node("n", node({}, {}));
  f.send_control({"n", flow::ControlVerb::SetParam, {{"gain", "2"}, {"bias", "1"}}});
  auto* b = dynamic_cast<FnBehavior*>(f.at("n").behavior.get());
  REQUIRE(b);
  CHECK(b->params == std::map<std::string, std::string>{{"gain", "2"}, {"bias", "1"}});
  CHECK_THROWS_WITH_AS(f.send_control({"missing", flow::ControlVerb::Enable, {}}),
                       doctest::Contains("UnknownNode"), Error);
}

TEST_CASE("default set_param rejects unknown parameters") {
  struct Bare final : flow::Behavior {
    void process(flow::StepContext&) override {}
  };
  flow::NodeSpec spec;
  spec.behavior = std::make_unique<Bare>();
  flow::Dataflow f;
  f.register_node("n", std::move(spec));
  CHECK_THROWS_WITH_AS(f.send_control({"n", flow::ControlVerb::SetParam, {{"x", "1"}}}),
                       doctest::Contains("UnsupportedParam"), Error);
}

TEST_CASE("enabled_changed fires only on transitions") {
  struct Watch final : flow::Behavior {
    std::vector<bool> calls;
    void process(flow::StepContext&) override {}
    void enabled_changed(bool enabled) override { calls.push_back(enabled); }
  };
  flow::NodeSpec spec;
  auto watch = std::make_unique<Watch>();
  Watch* w = watch.get();
  spec.behavior = std::move(watch);
  flow::Dataflow f;
  f.register_node("n", std::move(spec));

  CHECK(f.set_enabled("n", true) == true);  // already enabled, no transition
  CHECK(w->calls.empty());
  CHECK(f.set_enabled("n", false) == true);
  CHECK(f.set_enabled("n", false) == false);
  CHECK(f.set_enabled("n", true) == false);
  CHECK(w->calls == std::vector<bool>{false, true});
}

TEST_CASE("device binding requires a source node") {
  flow::Dataflow f;
  f.register_node("src", node({}, {{"out", PortKind::Valuator}}));
  f.register_node("filter", node({{"in", PortKind::Valuator}}, {}));
  f.bind_device("dev", "src");
  CHECK_THROWS_WITH_AS(f.bind_device("dev", "src"), doctest::Contains("DuplicateId"), Error);
  CHECK_THROWS_WITH_AS(f.bind_device("dev2", "filter"), doctest::Contains("TypeMismatch"),
                       Error);
  CHECK_THROWS_AS(f.bind_device("dev3", "missing"), Error);
  REQUIRE(f.device_node("dev"));
  CHECK(*f.device_node("dev") == "src");
  CHECK(f.device_node("other") == nullptr);
}

TEST_CASE("injected device samples reach the bound node") {
  flow::Dataflow f;
  std::vector<double> seen;
  f.register_node("src", node({}, {{"out", PortKind::Valuator}}, [](flow::StepContext& ctx) {
                    for (const DeviceSample& s : ctx.injected())
                      ctx.emit("out", std::get<Valuator>(s.sample));
                  }));
  f.register_node("sink", valuator_sink(&seen));
  f.connect("src", "out", "sink", "in");
  f.bind_device("dev", "src");

  flow::SingleStepModel model;
  const DeviceSample batch[] = {{"dev", 0.0, Valuator{4.0}}, {"dev", 0.01, Valuator{5.0}}};
  const flow::StepReport report = run_step(model, f, empty_scene, batch);
  CHECK(seen == std::vector<double>{4.0, 5.0});
  CHECK(report.deliveries == 4);  // two injections plus two edge deliveries

  const DeviceSample bad[] = {{"ghost", 0.02, Valuator{0.0}}};
  CHECK_THROWS_WITH_AS(run_step(model, f, empty_scene, bad), doctest::Contains("UnknownDevice"),
                       Error);
}

TEST_CASE("step numbering and time advance") {
  flow::Dataflow f;
  f.register_node("n", node({}, {}));
  flow::SingleStepModel model;
  scene::SceneState scene;
  const auto r0 = model.step(f, {}, 0.5, scene, nullptr);
  const auto r1 = model.step(f, {}, 0.5, scene, nullptr);
  CHECK(r0.step == 0);
  CHECK(r1.step == 1);
  CHECK(r0.time == 0.0);
  CHECK(r1.time == 0.5);
}

TEST_CASE("deferred writes flush at step end in issue order") {
  scene::SceneState scene;
  scene.add_object({.id = "obj"});
  flow::Dataflow f;
  math::Vec3 observed{-1, -1, -1};
  f.register_node("w1", node({}, {}, [](flow::StepContext& ctx) {
                    ctx.write_transform("obj", {{1, 0, 0}, {}});
                  }));
  f.register_node("w2", node({}, {}, [](flow::StepContext& ctx) {
                    ctx.write_transform("obj", {{2, 0, 0}, {}});
                  }));
  f.register_node("reader", node({}, {}, [&](flow::StepContext& ctx) {
                    observed = ctx.scene().object("obj")->transform.position;
                  }));

  flow::SingleStepModel model;
  std::vector<scene::DeferredWrite> writes;
  flow::StepTap tap{nullptr, &writes};
  const auto report = run_step(model, f, scene, {}, &tap);
  CHECK(observed == math::Vec3{0, 0, 0});  // readers saw the pre-step scene
  CHECK(scene.object("obj")->transform.position == math::Vec3{2, 0, 0});
  CHECK(report.writes_applied == 2);
  REQUIRE(writes.size() == 2);
  CHECK(writes[0].transform.position == math::Vec3{1, 0, 0});
  CHECK(writes[1].transform.position == math::Vec3{2, 0, 0});
}

TEST_CASE("scene changes notify listeners at the start of the next step") {
  scene::SceneState scene;
  scene.add_object({.id = "obj"});
  flow::Dataflow f;
  std::vector<math::Vec3> seen_positions;
  std::vector<std::string> seen_picks;
  bool write_now = false;
  f.register_node("writer", node({}, {}, [&](flow::StepContext& ctx) {
                    if (write_now) ctx.write_transform("obj", {{3, 2, 1}, {}});
                  }));
  f.register_node("watch", node({{"moved", PortKind::Locator}, {"flagged", PortKind::Pick}}, {},
                                [&](flow::StepContext& ctx) {
                                  for (const Sample& s : ctx.inputs("moved"))
                                    seen_positions.push_back(std::get<Locator>(s).position);
                                  for (const Sample& s : ctx.inputs("flagged"))
                                    seen_picks.push_back(*std::get<Pick>(s).target);
                                }));
  scene.add_listener("obj", "watch", "moved", PortKind::Locator);
  scene.add_listener("obj", "watch", "flagged", PortKind::Pick);

  flow::SingleStepModel model;
  write_now = true;
  run_step(model, f, scene);
  CHECK(seen_positions.empty());
  write_now = false;
  run_step(model, f, scene);
  CHECK(seen_positions == std::vector<math::Vec3>{{3, 2, 1}});
  CHECK(seen_picks == std::vector<std::string>{"obj"});
}

TEST_CASE("quit requests surface in the report") {
  flow::Dataflow f;
  f.register_node("n", node({}, {}, [](flow::StepContext& ctx) { ctx.request_quit(); }));
  flow::SingleStepModel model;
  CHECK(run_step(model, f, empty_scene).quit == true);
}

TEST_CASE("composite re-emits exported outputs under its own name") {
  flow::Dataflow inner;
  inner.register_node("doubler", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}},
                                      [](flow::StepContext& ctx) {
                                        for (const Sample& s : ctx.inputs("in"))
                                          ctx.emit("out",
                                                   Valuator{2.0 * std::get<Valuator>(s).value});
                                      }));
  flow::NodeSpec comp = flow::make_composite(std::move(inner),
                                             {{"in", {{"doubler", "in"}}}},
                                             {{"out", {"doubler", "out"}}});

  flow::Dataflow f;
  std::vector<double> seen;
  f.register_node("src", valuator_source(21.0));
  f.register_node("comp", std::move(comp));
  f.register_node("sink", valuator_sink(&seen));
  f.connect("src", "out", "comp", "in");
  f.connect("comp", "out", "sink", "in");

  flow::SingleStepModel model;
  std::vector<flow::Emission> emissions;
  flow::StepTap tap{&emissions, nullptr};
  run_step(model, f, empty_scene, {}, &tap);
  CHECK(seen == std::vector<double>{42.0});

  bool composite_attributed = false;
  for (const flow::Emission& e : emissions) {
    CHECK(e.node != "doubler");  // internal names never leak into the tap
    if (e.node == "comp" && e.oport == "out") composite_attributed = true;
  }
  CHECK(composite_attributed);
}

TEST_CASE("composite fans one exported input to several internal ports") {
  flow::Dataflow inner;
  std::vector<double> left, right;
  inner.register_node("l", valuator_sink(&left));
  inner.register_node("r", valuator_sink(&right));
  flow::NodeSpec comp =
      flow::make_composite(std::move(inner), {{"in", {{"l", "in"}, {"r", "in"}}}}, {});

  flow::Dataflow f;
  f.register_node("src", valuator_source(5.0));
  f.register_node("comp", std::move(comp));
  f.connect("src", "out", "comp", "in");

  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  CHECK(left == std::vector<double>{5.0});
  CHECK(right == std::vector<double>{5.0});
}

TEST_CASE("composite parameters route to internal behaviors") {
  flow::Dataflow inner;
  inner.register_node("a", node({}, {}));
  inner.register_node("b", node({}, {}));
  flow::NodeSpec comp = flow::make_composite(
      std::move(inner), {}, {},
      {{"gain", {{"a", "gain"}, {"b", "scale"}}}});

  flow::Dataflow f;
  flow::FilterNode& n = f.register_node("comp", std::move(comp));
  n.behavior->set_param("gain", "3");
  auto& internal = dynamic_cast<flow::CompositeBehavior&>(*n.behavior).internal();
  CHECK(dynamic_cast<FnBehavior&>(*internal.at("a").behavior).params.at("gain") == "3");
  CHECK(dynamic_cast<FnBehavior&>(*internal.at("b").behavior).params.at("scale") == "3");
  CHECK_THROWS_WITH_AS(n.behavior->set_param("nope", "1"), doctest::Contains("UnsupportedParam"),
                       Error);
}

TEST_CASE("internal control messages resolve inside first, then escape") {
  flow::Dataflow inner;
  inner.register_node("talker", node({}, {}, [](flow::StepContext& ctx) {
                        ctx.send_control({"buddy", flow::ControlVerb::Disable, {}});
                        ctx.send_control({"outerNode", flow::ControlVerb::Disable, {}});
                      }));
  inner.register_node("buddy", node({}, {}));
  flow::NodeSpec comp = flow::make_composite(std::move(inner), {}, {});

  flow::Dataflow f;
  f.register_node("comp", std::move(comp));
  f.register_node("outerNode", node({}, {}));

  flow::SingleStepModel model;
  run_step(model, f, empty_scene);
  auto& internal = dynamic_cast<flow::CompositeBehavior&>(*f.at("comp").behavior).internal();
  CHECK(internal.at("buddy").enabled == false);
  CHECK(f.at("outerNode").enabled == false);
}

TEST_CASE("composite scene writes land in the enclosing step") {
  scene::SceneState scene;
  scene.add_object({.id = "obj"});
  flow::Dataflow inner;
  inner.register_node("writer", node({}, {}, [](flow::StepContext& ctx) {
                        ctx.write_transform("obj", {{9, 9, 9}, {}});
                      }));
  flow::NodeSpec comp = flow::make_composite(std::move(inner), {}, {});

  flow::Dataflow f;
  f.register_node("comp", std::move(comp));
  math::Vec3 observed{-1, -1, -1};
  f.register_node("reader", node({}, {}, [&](flow::StepContext& ctx) {
                    observed = ctx.scene().object("obj")->transform.position;
                  }));

  flow::SingleStepModel model;
  const auto report = run_step(model, f, scene);
  CHECK(observed == math::Vec3{0, 0, 0});  // still deferred while the step runs
  CHECK(report.writes_applied == 1);
  CHECK(scene.object("obj")->transform.position == math::Vec3{9, 9, 9});
}

TEST_CASE("composite construction validates its mappings") {
  auto cyclic = [] {
    flow::Dataflow inner;
    inner.register_node("a", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
    inner.register_node("b", node({{"in", PortKind::Valuator}}, {{"out", PortKind::Valuator}}));
    inner.connect("a", "out", "b", "in");
    CHECK_THROWS_AS(inner.connect("b", "out", "a", "in"), Error);
    return inner;
  };
  CHECK_NOTHROW(flow::make_composite(cyclic(), {}, {}));

  flow::Dataflow inner1;
  inner1.register_node("a", node({{"in", PortKind::Valuator}}, {}));
  CHECK_THROWS_WITH_AS(
      flow::make_composite(std::move(inner1), {{"in", {{"a", "missing"}}}}, {}),
      doctest::Contains("UnknownInternalPort"), Error);

  flow::Dataflow inner2;
  inner2.register_node("a", node({{"v", PortKind::Valuator}, {"l", PortKind::Locator}}, {}));
  CHECK_THROWS_WITH_AS(
      flow::make_composite(std::move(inner2), {{"in", {{"a", "v"}, {"a", "l"}}}}, {}),
      doctest::Contains("TypeMismatch"), Error);

  flow::Dataflow inner3;
  inner3.register_node("a", node({{"v", PortKind::Valuator}}, {{"o", PortKind::Valuator}}));
  CHECK_THROWS_WITH_AS(
      flow::make_composite(std::move(inner3), {{"dup", {{"a", "v"}}}, {"dup", {{"a", "v"}}}},
                           {}),
      doctest::Contains("DuplicateId"), Error);
}
