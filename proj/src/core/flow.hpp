// Dataflow runtime. Filters are nodes with typed input/output ports wired by
// directed edges; one step runs every node once in topological order
// (registration order breaks ties). Each node execution has three phases:
// collect buffered inputs, process, send buffered emissions downstream.
// Scene access during process is read-only; mutations queue as DeferredWrites
// and flush when the step ends, so every node observes the pre-step scene.
#pragma once

#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "sample.hpp"
#include "scene.hpp"

namespace itflow::flow {

struct InputPort {
  std::string name;
  PortKind kind = PortKind::Locator;
  std::vector<Sample> buffer;     // filled by upstream sends, drained at collect
  std::vector<Sample> collected;  // what process() sees this step
};

struct OutputPort {
  std::string name;
  PortKind kind = PortKind::Locator;
};

struct Edge {
  std::string src;
  std::string oport;
  std::string dst;
  std::string iport;
};

struct PortRef {
  std::string node;
  std::string port;
};

enum class ControlVerb { Enable, Disable, SetMode, SetParam };

// Out-of-band message to another filter; applied synchronously when sent and
// effective from the target's next execution.
struct ControlMessage {
  std::string target;
  ControlVerb verb = ControlVerb::Enable;
  std::map<std::string, std::string> payload;
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  long deliveries = 0;
  int writes_applied = 0;
  bool quit = false;
};

class Behavior;

struct PortSpec {
  std::string name;
  PortKind kind = PortKind::Locator;
};

struct NodeSpec {
  std::vector<PortSpec> inputs;
  std::vector<PortSpec> outputs;
  std::unique_ptr<Behavior> behavior;
  bool start_disabled = false;
};

struct FilterNode {
  std::string id;
  bool enabled = true;
  std::vector<InputPort> inputs;
  std::vector<OutputPort> outputs;
  std::vector<DeviceSample> injected;  // device samples waiting for collect
  std::unique_ptr<Behavior> behavior;

  InputPort* input(std::string_view name);
  const InputPort* input(std::string_view name) const;
  OutputPort* output(std::string_view name);
  const OutputPort* output(std::string_view name) const;
};

class Dataflow {
 public:
  FilterNode& register_node(const std::string& id, NodeSpec spec);

  // Adds an edge after validating both ports and kinds; refuses edges that
  // would close a cycle.
  void connect(const std::string& src, const std::string& oport, const std::string& dst,
               const std::string& iport);

  // Removes every edge touching the node (it stays registered); returns the
  // number of edges removed.
  std::size_t disconnect_node(const std::string& id);

  // Removes every edge feeding one input port; returns the number removed.
  std::size_t disconnect_into(const std::string& dst, const std::string& iport);

  // Returns the previous enabled state.
  bool set_enabled(const std::string& id, bool enabled);

  // Applies a control message to this graph (UnknownNode when the target is
  // not registered here).
  void send_control(const ControlMessage& msg);

  // Binds a device id to a source node; the node must have no input ports.
  void bind_device(const std::string& device, const std::string& node);
  const std::string* device_node(const std::string& device) const;
  const std::map<std::string, std::string>& device_bindings() const { return devices_; }

  FilterNode* find(const std::string& id);
  const FilterNode* find(const std::string& id) const;
  FilterNode& at(const std::string& id);
  const FilterNode& at(const std::string& id) const;

  const std::vector<std::unique_ptr<FilterNode>>& nodes() const { return nodes_; }
  const std::vector<Edge>& edges() const { return edges_; }

  // Execution order: topological, ties broken by registration order. The
  // cached order is recomputed transparently after wiring changes.
  const std::vector<std::string>& topo_order() const;

 private:
  std::vector<std::unique_ptr<FilterNode>> nodes_;
  std::map<std::string, std::size_t> index_;
  std::vector<Edge> edges_;
  std::map<std::string, std::string> devices_;
  mutable std::vector<std::string> order_;
  mutable bool order_dirty_ = true;
};

// Shared sinks and context for one pass over a graph. Composites run their
// internal graph with the same sinks, so writes, quit requests and delivery
// counts from nested filters land in the enclosing step.
struct StepEnv {
  const scene::SceneState* scene = nullptr;
  double dt = 0.0;
  int step_index = 0;
  std::vector<scene::DeferredWrite>* writes = nullptr;
  int* sequence = nullptr;
  bool* quit = nullptr;
  long* deliveries = nullptr;
  std::function<void(const std::string& node, const std::string& oport, const Sample&)> on_send;
  std::function<void(const ControlMessage&)> route_control;
};

class StepContext {
 public:
  StepContext(FilterNode& node, const StepEnv& env, std::vector<DeviceSample> injected);

  const std::string& node_id() const { return node_.id; }
  double dt() const { return env_.dt; }
  int step_index() const { return env_.step_index; }
  const scene::SceneState& scene() const { return *env_.scene; }

  std::span<const Sample> inputs(std::string_view iport) const;
  std::span<const DeviceSample> injected() const { return injected_; }

  // Buffers a sample on an output port; delivery happens in the send phase.
  void emit(std::string_view oport, Sample sample);
  void send_control(ControlMessage msg);
  void write_transform(const std::string& object, const scene::Transform& t);
  void write_flag(const std::string& object, scene::ObjectFlag flag, bool value);
  void request_quit();

  const StepEnv& env() const { return env_; }

  struct PendingEmission {
    std::string oport;
    Sample sample;
  };
  std::vector<PendingEmission>& pending() { return pending_; }

 private:
  FilterNode& node_;
  const StepEnv& env_;
  std::vector<DeviceSample> injected_;
  std::vector<PendingEmission> pending_;
};

class Behavior {
 public:
  virtual ~Behavior() = default;
  virtual void process(StepContext& ctx) = 0;
  virtual void set_param(std::string_view name, const std::string& value);
  virtual void enabled_changed(bool /*enabled*/) {}
  // Called once after construction parameters are applied.
  virtual void finalize() {}
};

// Runs collect/process/send once for every node in topological order.
void run_pass(Dataflow& flow, const StepEnv& env);

struct Emission {
  std::string node;
  std::string oport;
  Sample sample;
};

// Optional per-step capture used by the trace writer and by tests.
struct StepTap {
  std::vector<Emission>* emissions = nullptr;
  std::vector<scene::DeferredWrite>* writes = nullptr;
};

class ExecutionModel {
 public:
  virtual ~ExecutionModel() = default;
  virtual StepReport step(Dataflow& flow, std::span<const DeviceSample> batch, double dt,
                          scene::SceneState& scene, StepTap* tap) = 0;
};

// Single-threaded stepper: delivers scene notifications queued by the
// previous step, injects the device batch, runs one pass, then flushes
// deferred writes in sequence order.
class SingleStepModel final : public ExecutionModel {
 public:
  StepReport step(Dataflow& flow, std::span<const DeviceSample> batch, double dt,
                  scene::SceneState& scene, StepTap* tap = nullptr) override;

 private:
  int next_index_ = 0;
  std::vector<scene::DeferredWrite> writes_;
};

// A composite hides an internal dataflow behind a single node. Exported
// inputs fan incoming samples out to internal ports; emissions from exported
// internal outputs re-emit on the composite's ports. Control messages from
// internal filters resolve internally first, then escape to the outer graph.
class CompositeBehavior final : public Behavior {
 public:
  struct InputMap {
    std::string external;
    std::vector<PortRef> targets;
  };
  struct OutputMap {
    std::string external;
    PortRef source;
  };
  using ParamRoutes = std::map<std::string, std::vector<std::pair<std::string, std::string>>>;

  CompositeBehavior(Dataflow internal, std::vector<InputMap> ins, std::vector<OutputMap> outs,
                    ParamRoutes params);

  void process(StepContext& ctx) override;
  void set_param(std::string_view name, const std::string& value) override;

  Dataflow& internal() { return internal_; }
  const Dataflow& internal() const { return internal_; }

 private:
  Dataflow internal_;
  std::vector<InputMap> ins_;
  std::vector<OutputMap> outs_;
  ParamRoutes params_;
};

// Validates the mappings and wraps the internal graph in a NodeSpec ready for
// register_node.
NodeSpec make_composite(Dataflow internal, std::vector<CompositeBehavior::InputMap> ins,
                        std::vector<CompositeBehavior::OutputMap> outs,
                        CompositeBehavior::ParamRoutes params = {});

}  // namespace itflow::flow
