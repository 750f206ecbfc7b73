#include "flow.hpp"

#include <algorithm>
#include <queue>
#include <set>

namespace itflow::flow {

namespace {

template <typename Port>
Port* find_port(std::vector<Port>& ports, std::string_view name) {
  for (Port& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

template <typename Port>
const Port* find_port(const std::vector<Port>& ports, std::string_view name) {
  for (const Port& p : ports)
    if (p.name == name) return &p;
  return nullptr;
}

}  // namespace

InputPort* FilterNode::input(std::string_view name) { return find_port(inputs, name); }
const InputPort* FilterNode::input(std::string_view name) const { return find_port(inputs, name); }
OutputPort* FilterNode::output(std::string_view name) { return find_port(outputs, name); }
const OutputPort* FilterNode::output(std::string_view name) const { return find_port(outputs, name); }

void Behavior::set_param(std::string_view name, const std::string&) {
  fail(Err::UnsupportedParam, "filter does not accept parameter '" + std::string(name) + "'");
}

FilterNode& Dataflow::register_node(const std::string& id, NodeSpec spec) {
  if (id.empty()) fail(Err::DuplicateId, "node id must not be empty");
  if (index_.count(id)) fail(Err::DuplicateId, "node '" + id + "' already registered");

  auto node = std::make_unique<FilterNode>();
  node->id = id;
  node->enabled = !spec.start_disabled;
  std::set<std::string> names;
  for (const PortSpec& p : spec.inputs) {
    if (!names.insert(p.name).second)
      fail(Err::DuplicateId, "duplicate port '" + p.name + "' on node '" + id + "'");
    node->inputs.push_back({p.name, p.kind, {}, {}});
  }
  for (const PortSpec& p : spec.outputs) {
    if (!names.insert(p.name).second)
      fail(Err::DuplicateId, "duplicate port '" + p.name + "' on node '" + id + "'");
    node->outputs.push_back({p.name, p.kind});
  }
  node->behavior = std::move(spec.behavior);

  index_[id] = nodes_.size();
  nodes_.push_back(std::move(node));
  order_dirty_ = true;
  return *nodes_.back();
}

FilterNode* Dataflow::find(const std::string& id) {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : nodes_[it->second].get();
}

const FilterNode* Dataflow::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : nodes_[it->second].get();
}

FilterNode& Dataflow::at(const std::string& id) {
  FilterNode* n = find(id);
  if (!n) fail(Err::UnknownNode, "no node named '" + id + "'");
  return *n;
}

const FilterNode& Dataflow::at(const std::string& id) const {
  const FilterNode* n = find(id);
  if (!n) fail(Err::UnknownNode, "no node named '" + id + "'");
  return *n;
}

void Dataflow::connect(const std::string& src, const std::string& oport, const std::string& dst,
                       const std::string& iport) {
  FilterNode& from = at(src);
  FilterNode& to = at(dst);
  const OutputPort* out = from.output(oport);
  if (!out) fail(Err::UnknownPort, "node '" + src + "' has no output port '" + oport + "'");
  const InputPort* in = to.input(iport);
  if (!in) fail(Err::UnknownPort, "node '" + dst + "' has no input port '" + iport + "'");
  if (out->kind != in->kind)
    fail(Err::TypeMismatch, src + "." + oport + " (" + to_string(out->kind) + ") cannot feed " +
                                dst + "." + iport + " (" + to_string(in->kind) + ")");

  // Reject the edge if dst already reaches src.
  if (src == dst) fail(Err::CycleCreated, "edge " + src + " -> " + dst + " would close a cycle");
  std::set<std::string> seen{dst};
  std::vector<const std::string*> frontier{&dst};
  while (!frontier.empty()) {
    const std::string& cur = *frontier.back();
    frontier.pop_back();
    for (const Edge& e : edges_) {
      if (e.src != cur) continue;
      if (e.dst == src)
        fail(Err::CycleCreated, "edge " + src + " -> " + dst + " would close a cycle");
      auto [it, inserted] = seen.insert(e.dst);
      if (inserted) frontier.push_back(&*it);
    }
  }

  edges_.push_back({src, oport, dst, iport});
  order_dirty_ = true;
}

std::size_t Dataflow::disconnect_node(const std::string& id) {
  at(id);
  const std::size_t before = edges_.size();
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                              [&](const Edge& e) { return e.src == id || e.dst == id; }),
               edges_.end());
  order_dirty_ = true;
  return before - edges_.size();
}

std::size_t Dataflow::disconnect_into(const std::string& dst, const std::string& iport) {
  at(dst);
  const std::size_t before = edges_.size();
  edges_.erase(std::remove_if(edges_.begin(), edges_.end(),
                              [&](const Edge& e) { return e.dst == dst && e.iport == iport; }),
               edges_.end());
  order_dirty_ = true;
  return before - edges_.size();
}

bool Dataflow::set_enabled(const std::string& id, bool enabled) {
  FilterNode& node = at(id);
  const bool previous = node.enabled;
  if (previous != enabled) {
    node.enabled = enabled;
    if (node.behavior) node.behavior->enabled_changed(enabled);
  }
  return previous;
}

void Dataflow::send_control(const ControlMessage& msg) {
  FilterNode& node = at(msg.target);
  switch (msg.verb) {
    case ControlVerb::Enable:
      set_enabled(msg.target, true);
      break;
    case ControlVerb::Disable:
      set_enabled(msg.target, false);
      break;
    case ControlVerb::SetMode:
    case ControlVerb::SetParam:
      if (!node.behavior)
        fail(Err::UnsupportedParam, "node '" + msg.target + "' has no parameters");
      for (const auto& [key, value] : msg.payload) node.behavior->set_param(key, value);
      break;
  }
}

void Dataflow::bind_device(const std::string& device, const std::string& node) {
  const FilterNode& n = at(node);
  if (!n.inputs.empty())
    fail(Err::TypeMismatch,
         "device '" + device + "' must bind to a source node, but '" + node + "' has inputs");
  auto [it, inserted] = devices_.emplace(device, node);
  if (!inserted) fail(Err::DuplicateId, "device '" + device + "' already bound to '" + it->second + "'");
}

const std::string* Dataflow::device_node(const std::string& device) const {
  auto it = devices_.find(device);
  return it == devices_.end() ? nullptr : &it->second;
}

const std::vector<std::string>& Dataflow::topo_order() const {
  if (!order_dirty_) return order_;

  const std::size_t n = nodes_.size();
  std::vector<int> indegree(n, 0);
  std::vector<std::vector<std::size_t>> adj(n);
  for (const Edge& e : edges_) {
    const std::size_t u = index_.at(e.src);
    const std::size_t v = index_.at(e.dst);
    adj[u].push_back(v);
    ++indegree[v];
  }

  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indegree[i] == 0) ready.push(i);

  order_.clear();
  order_.reserve(n);
  while (!ready.empty()) {
    const std::size_t i = ready.top();
    ready.pop();
    order_.push_back(nodes_[i]->id);
    for (std::size_t v : adj[i])
      if (--indegree[v] == 0) ready.push(v);
  }
  if (order_.size() != n) {
    order_.clear();
    fail(Err::CycleDetected, "dataflow graph contains a cycle");
  }
  order_dirty_ = false;
  return order_;
}

StepContext::StepContext(FilterNode& node, const StepEnv& env, std::vector<DeviceSample> injected)
    : node_(node), env_(env), injected_(std::move(injected)) {}

std::span<const Sample> StepContext::inputs(std::string_view iport) const {
  const InputPort* p = node_.input(iport);
  if (!p) fail(Err::UnknownPort, "node '" + node_.id + "' has no input port '" + std::string(iport) + "'");
  return p->collected;
}

void StepContext::emit(std::string_view oport, Sample sample) {
  const OutputPort* p = node_.output(oport);
  if (!p)
    fail(Err::UnknownPort, "node '" + node_.id + "' has no output port '" + std::string(oport) + "'");
  if (p->kind != kind_of(sample))
    fail(Err::TypeMismatch, "port " + node_.id + "." + p->name + " carries " +
                                std::string(to_string(p->kind)) + ", not " +
                                std::string(to_string(kind_of(sample))));
  pending_.push_back({p->name, std::move(sample)});
}

void StepContext::send_control(ControlMessage msg) {
  if (!env_.route_control) fail(Err::UnknownNode, "no control route configured");
  env_.route_control(msg);
}

void StepContext::write_transform(const std::string& object, const scene::Transform& t) {
  scene::DeferredWrite w;
  w.object = object;
  w.kind = scene::DeferredWrite::Kind::Transform;
  w.transform = t;
  w.origin = node_.id;
  w.sequence = ++*env_.sequence;
  env_.writes->push_back(std::move(w));
}

void StepContext::write_flag(const std::string& object, scene::ObjectFlag flag, bool value) {
  scene::DeferredWrite w;
  w.object = object;
  w.kind = scene::DeferredWrite::Kind::Flag;
  w.flag = flag;
  w.value = value;
  w.origin = node_.id;
  w.sequence = ++*env_.sequence;
  env_.writes->push_back(std::move(w));
}

void StepContext::request_quit() {
  if (env_.quit) *env_.quit = true;
}

void run_pass(Dataflow& flow, const StepEnv& env) {
  const std::vector<std::string> order = flow.topo_order();
  for (const std::string& id : order) {
    FilterNode& node = flow.at(id);

    // Collect. Buffers drain even when the node is disabled so stale input
    // never survives into a later step.
    for (InputPort& ip : node.inputs) {
      ip.collected = std::move(ip.buffer);
      ip.buffer.clear();
    }
    std::vector<DeviceSample> injected = std::move(node.injected);
    node.injected.clear();
    if (!node.enabled) {
      for (InputPort& ip : node.inputs) ip.collected.clear();
      continue;
    }

    StepContext ctx(node, env, std::move(injected));
    if (node.behavior) node.behavior->process(ctx);

    // Send: deliver to downstream buffers in edge creation order.
    for (StepContext::PendingEmission& pe : ctx.pending()) {
      for (const Edge& e : flow.edges()) {
        if (e.src != id || e.oport != pe.oport) continue;
        flow.at(e.dst).input(e.iport)->buffer.push_back(pe.sample);
        if (env.deliveries) ++*env.deliveries;
      }
      if (env.on_send) env.on_send(id, pe.oport, pe.sample);
    }
    for (InputPort& ip : node.inputs) ip.collected.clear();
  }
}

StepReport SingleStepModel::step(Dataflow& flow, std::span<const DeviceSample> batch, double dt,
                                 scene::SceneState& scene, StepTap* tap) {
  StepReport report;
  report.step = next_index_++;
  report.time = report.step * dt;

  long deliveries = 0;
  bool quit = false;
  int sequence = 0;
  writes_.clear();

  // Scene changes applied at the end of the previous step surface now.
  for (const scene::Notification& n : scene.take_notifications()) {
    InputPort* ip = flow.at(n.node).input(n.iport);
    if (!ip) fail(Err::UnknownPort, "listener port " + n.node + "." + n.iport + " does not exist");
    if (ip->kind != kind_of(n.sample))
      fail(Err::TypeMismatch, "listener port " + n.node + "." + n.iport + " kind mismatch");
    ip->buffer.push_back(n.sample);
    ++deliveries;
  }

  for (const DeviceSample& ds : batch) {
    const std::string* node = flow.device_node(ds.device);
    if (!node) fail(Err::UnknownDevice, "no device bound as '" + ds.device + "'");
    flow.at(*node).injected.push_back(ds);
    ++deliveries;
  }

  StepEnv env;
  env.scene = &scene;
  env.dt = dt;
  env.step_index = report.step;
  env.writes = &writes_;
  env.sequence = &sequence;
  env.quit = &quit;
  env.deliveries = &deliveries;
  if (tap && tap->emissions) {
    std::vector<Emission>* sink = tap->emissions;
    env.on_send = [sink](const std::string& node, const std::string& oport, const Sample& s) {
      sink->push_back({node, oport, s});
    };
  }
  env.route_control = [&flow](const ControlMessage& msg) { flow.send_control(msg); };

  run_pass(flow, env);

  // Flush in sequence order; writes_ is already append-ordered.
  for (const scene::DeferredWrite& w : writes_) {
    scene.apply_mutation(w);
    if (tap && tap->writes) tap->writes->push_back(w);
    ++report.writes_applied;
  }

  report.deliveries = deliveries;
  report.quit = quit;
  return report;
}

CompositeBehavior::CompositeBehavior(Dataflow internal, std::vector<InputMap> ins,
                                     std::vector<OutputMap> outs, ParamRoutes params)
    : internal_(std::move(internal)), ins_(std::move(ins)), outs_(std::move(outs)),
      params_(std::move(params)) {}

void CompositeBehavior::process(StepContext& ctx) {
  // Fan exported inputs out to the mapped internal ports.
  for (const InputMap& im : ins_) {
    std::span<const Sample> samples = ctx.inputs(im.external);
    if (samples.empty()) continue;
    for (const PortRef& t : im.targets) {
      InputPort* ip = internal_.at(t.node).input(t.port);
      for (const Sample& s : samples) {
        ip->buffer.push_back(s);
        if (ctx.env().deliveries) ++*ctx.env().deliveries;
      }
    }
  }

  StepEnv inner = ctx.env();
  inner.on_send = [this, &ctx](const std::string& node, const std::string& oport, const Sample& s) {
    for (const OutputMap& om : outs_)
      if (om.source.node == node && om.source.port == oport) ctx.emit(om.external, s);
  };
  const StepEnv& outer = ctx.env();
  inner.route_control = [this, &outer](const ControlMessage& msg) {
    if (internal_.find(msg.target))
      internal_.send_control(msg);
    else if (outer.route_control)
      outer.route_control(msg);
    else
      fail(Err::UnknownNode, "no node named '" + msg.target + "'");
  };
  run_pass(internal_, inner);
}

void CompositeBehavior::set_param(std::string_view name, const std::string& value) {
  auto it = params_.find(std::string(name));
  if (it == params_.end())
    fail(Err::UnsupportedParam, "composite does not accept parameter '" + std::string(name) + "'");
  for (const auto& [node, param] : it->second) internal_.at(node).behavior->set_param(param, value);
}

NodeSpec make_composite(Dataflow internal, std::vector<CompositeBehavior::InputMap> ins,
                        std::vector<CompositeBehavior::OutputMap> outs,
                        CompositeBehavior::ParamRoutes params) {
  try {
    internal.topo_order();
  } catch (const Error&) {
    fail(Err::InternalCycle, "composite internal graph contains a cycle");
  }

  NodeSpec spec;
  std::set<std::string> names;
  for (const auto& im : ins) {
    if (!names.insert(im.external).second)
      fail(Err::DuplicateId, "duplicate exported port '" + im.external + "'");
    if (im.targets.empty())
      fail(Err::UnknownInternalPort, "exported input '" + im.external + "' maps to nothing");
    PortKind kind = PortKind::Locator;
    bool first = true;
    for (const PortRef& t : im.targets) {
      const FilterNode* node = internal.find(t.node);
      const InputPort* ip = node ? node->input(t.port) : nullptr;
      if (!ip)
        fail(Err::UnknownInternalPort,
             "exported input '" + im.external + "' maps to missing " + t.node + "." + t.port);
      if (first) {
        kind = ip->kind;
        first = false;
      } else if (ip->kind != kind) {
        fail(Err::TypeMismatch, "exported input '" + im.external + "' maps to mixed port kinds");
      }
    }
    spec.inputs.push_back({im.external, kind});
  }
  for (const auto& om : outs) {
    if (!names.insert(om.external).second)
      fail(Err::DuplicateId, "duplicate exported port '" + om.external + "'");
    const FilterNode* node = internal.find(om.source.node);
    const OutputPort* op = node ? node->output(om.source.port) : nullptr;
    if (!op)
      fail(Err::UnknownInternalPort, "exported output '" + om.external + "' maps to missing " +
                                         om.source.node + "." + om.source.port);
    spec.outputs.push_back({om.external, op->kind});
  }
  spec.behavior = std::make_unique<CompositeBehavior>(std::move(internal), std::move(ins),
                                                      std::move(outs), std::move(params));
  return spec;
}

}  // namespace itflow::flow
