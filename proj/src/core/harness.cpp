#include "harness.hpp"

#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "filters.hpp"
#include "version.hpp"

namespace itflow::harness {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Err::Io, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(Err::Io, "cannot read '" + path + "'");
  return std::move(buf).str();
}

std::string_view to_string(DirectiveAction action) {
  switch (action) {
    case DirectiveAction::Enable: return "enable";
    case DirectiveAction::Disable: return "disable";
    case DirectiveAction::DisconnectNode: return "disconnectNode";
    case DirectiveAction::Connect: return "connect";
    case DirectiveAction::SetSelectionIT: return "setSelectionIT";
    case DirectiveAction::SetParam: return "setParam";
  }
  return "?";
}

namespace {

using jsonio::Json;

std::optional<DirectiveAction> action_from(std::string_view name) {
  for (DirectiveAction a :
       {DirectiveAction::Enable, DirectiveAction::Disable, DirectiveAction::DisconnectNode,
        DirectiveAction::Connect, DirectiveAction::SetSelectionIT, DirectiveAction::SetParam})
    if (name == to_string(a)) return a;
  return std::nullopt;
}

std::string scalar_to_string(const Json& v, const std::string& key, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return v.dump();
  fail(Err::ParseError, where + ": argument '" + key + "' must be a scalar");
}

void require_args(const Directive& d, std::initializer_list<const char*> keys,
                  const std::string& where) {
  for (const char* key : keys)
    if (!d.args.count(key))
      fail(Err::ParseError, where + ": directive '" + std::string(to_string(d.action)) +
                                "' needs argument '" + key + "'");
}

}  // namespace

Script load_script(std::string_view text) {
  Script script;
  std::map<std::string, double> last_ts;
  double last_at = -std::numeric_limits<double>::infinity();

  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == std::string_view::npos ? eol : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;

    const std::string where = "script line " + std::to_string(line_no);
    Json record;
    try {
      record = Json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      fail(Err::ParseError, where + ": " + e.what());
    }
    if (!record.is_object()) fail(Err::ParseError, where + ": expected a JSON object");

    if (auto dir = record.find("directive"); dir != record.end()) {
      if (!dir->is_string()) fail(Err::ParseError, where + ": 'directive' must be a string");
      const auto action = action_from(dir->get<std::string>());
      if (!action)
        fail(Err::ParseError,
             where + ": unknown directive '" + dir->get<std::string>() + "'");
      auto at = record.find("at");
      if (at == record.end() || !at->is_number())
        fail(Err::ParseError, where + ": a directive needs a numeric 'at'");

      Directive d;
      d.at = at->get<double>();
      d.action = *action;
      d.line = line_no;
      for (const auto& [key, value] : record.items()) {
        if (key == "directive" || key == "at") continue;
        d.args[key] = scalar_to_string(value, key, where);
      }
      if (d.at < last_at)
        fail(Err::UnsortedTimestamps, where + ": directive times must be non-decreasing");
      last_at = d.at;

      switch (d.action) {
        case DirectiveAction::Enable:
        case DirectiveAction::Disable:
        case DirectiveAction::DisconnectNode:
          require_args(d, {"target"}, where);
          break;
        case DirectiveAction::Connect:
          require_args(d, {"origin", "srcport", "dest", "dstport"}, where);
          break;
        case DirectiveAction::SetSelectionIT:
          require_args(d, {"target", "it"}, where);
          break;
        case DirectiveAction::SetParam:
          require_args(d, {"target"}, where);
          break;
      }
      script.directives.push_back(std::move(d));
      continue;
    }

    auto device = record.find("device");
    if (device == record.end())
      fail(Err::ParseError, where + ": a record needs 'device' or 'directive'");
    if (!device->is_string()) fail(Err::ParseError, where + ": 'device' must be a string");
    auto t = record.find("t");
    if (t == record.end() || !t->is_number())
      fail(Err::ParseError, where + ": a sample needs a numeric 't'");
    auto kind = record.find("kind");
    if (kind == record.end() || !kind->is_string())
      fail(Err::ParseError, where + ": a sample needs a string 'kind'");

    DeviceSample s;
    s.device = device->get<std::string>();
    s.timestamp = t->get<double>();
    s.sample = jsonio::read_sample(record, kind->get<std::string>(), s.device, where);

    auto [it, inserted] = last_ts.emplace(s.device, s.timestamp);
    if (!inserted) {
      if (s.timestamp < it->second)
        fail(Err::UnsortedTimestamps,
             where + ": timestamps for device '" + s.device + "' must be non-decreasing");
      it->second = s.timestamp;
    }
    script.samples.push_back(std::move(s));
  }
  return script;
}

Script load_script_file(const std::string& path) { return load_script(read_file(path)); }

LoadedWorld load_world_text(std::string text, std::string origin,
                            const dsl::FactoryRegistry& registry) {
  LoadedWorld world;
  world.text = std::move(text);
  world.origin = std::move(origin);
  world.spec = dsl::parse_world(world.text);
  world.diagnostics = dsl::validate(world.spec, registry);
  return world;
}

LoadedWorld load_world_file(const std::string& path, const dsl::FactoryRegistry& registry) {
  return load_world_text(read_file(path), path, registry);
}

Runner::Runner(const LoadedWorld& world, const dsl::FactoryRegistry& registry, Script script,
               const RunConfig& config)
    : script_(std::move(script)), config_(config) {
  if (!world.diagnostics.empty())
    fail(Err::ValidationFailed, world.origin + ": world has " +
                                    std::to_string(world.diagnostics.size()) +
                                    " validation error(s)");
  world_ = dsl::instantiate(world.spec, registry);

  for (const dsl::InstanceDecl& inst : world.spec.instances) {
    if (inst.kind != dsl::InstanceKind::Videv) continue;
    const dsl::FactoryInfo* info = registry.find(inst.type);
    const PortKind kind = info->outputs.front().kind;
    devices::QueueMode mode = devices::default_mode(kind);
    if (inst.mode) mode = *inst.mode == "queueAll" ? devices::QueueMode::QueueAll
                                                   : devices::QueueMode::KeepLast;
    queue_.register_device(inst.name, kind, mode);
  }

  for (const DeviceSample& s : script_.samples) {
    if (!queue_.has_device(s.device))
      fail(Err::UnknownDevice, "script uses unknown device '" + s.device + "'");
    if (queue_.device_kind(s.device) != kind_of(s.sample))
      fail(Err::TypeMismatch, "device '" + s.device + "' does not produce " +
                                  std::string(to_string(kind_of(s.sample))) + " samples");
  }

  header_ = Json{{"trace", "itflow"},
                 {"version", kVersion},
                 {"world", world.origin},
                 {"worldHash", hex64(fnv1a64(world.text))},
                 {"script", config_.script_path.empty() ? Json(nullptr) : Json(config_.script_path)},
                 {"steps", config_.steps},
                 {"dt", config_.dt},
                 {"seed", config_.seed}};
}

void Runner::apply_directive(const Directive& d) {
  try {
    switch (d.action) {
      case DirectiveAction::Enable:
        world_.flow.set_enabled(d.args.at("target"), true);
        break;
      case DirectiveAction::Disable:
        world_.flow.set_enabled(d.args.at("target"), false);
        break;
      case DirectiveAction::DisconnectNode:
        world_.flow.disconnect_node(d.args.at("target"));
        break;
      case DirectiveAction::Connect:
        world_.flow.connect(d.args.at("origin"), d.args.at("srcport"), d.args.at("dest"),
                            d.args.at("dstport"));
        break;
      case DirectiveAction::SetSelectionIT:
        filters::set_selection_it(world_.flow, d.args.at("target"), d.args.at("it"));
        break;
      case DirectiveAction::SetParam: {
        flow::ControlMessage msg;
        msg.target = d.args.at("target");
        msg.verb = flow::ControlVerb::SetParam;
        for (const auto& [key, value] : d.args)
          if (key != "target") msg.payload[key] = value;
        world_.flow.send_control(msg);
        break;
      }
    }
  } catch (const Error& e) {
    fail(Err::UnresolvedDirective, "line " + std::to_string(d.line) + ": " + e.what());
  }
}

RunResult Runner::run(std::ostream& out, const Observer& observer) {
  out << header_.dump() << '\n';

  RunResult result;
  std::size_t next_sample = 0;
  std::size_t next_directive = 0;

  for (int k = 0; k < config_.steps; ++k) {
    const double now = static_cast<double>(k) * config_.dt;
    const double due = now + config_.dt * 1e-9;

    Json applied = Json::array();
    while (next_directive < script_.directives.size() &&
           script_.directives[next_directive].at <= due) {
      const Directive& d = script_.directives[next_directive++];
      apply_directive(d);
      Json rec{{"at", d.at}, {"action", std::string(to_string(d.action))}};
      for (const auto& [key, value] : d.args) rec[key] = value;
      applied.push_back(std::move(rec));
    }

    while (next_sample < script_.samples.size() &&
           script_.samples[next_sample].timestamp <= due)
      queue_.push(script_.samples[next_sample++]);
    const std::vector<DeviceSample> batch = queue_.drain_upto(due);

    std::vector<flow::Emission> emissions;
    std::vector<scene::DeferredWrite> writes;
    flow::StepTap tap{&emissions, &writes};
    const flow::StepReport report = model_.step(world_.flow, batch, config_.dt, world_.scene, &tap);

    Json record{{"step", report.step}, {"t", report.time}};
    Json injected = Json::array();
    for (const DeviceSample& s : batch) {
      Json rec{{"t", s.timestamp}, {"device", s.device}};
      jsonio::write_sample(rec, s.sample);
      injected.push_back(std::move(rec));
    }
    record["injected"] = std::move(injected);
    record["directives"] = std::move(applied);

    Json emitted = Json::array();
    for (const flow::Emission& e : emissions) {
      Json rec{{"node", e.node}, {"port", e.oport}};
      jsonio::write_sample(rec, e.sample);
      emitted.push_back(std::move(rec));
      if (const Pick* pick = std::get_if<Pick>(&e.sample)) current_pick_ = pick->target;
    }
    record["emissions"] = std::move(emitted);

    Json written = Json::array();
    for (const scene::DeferredWrite& w : writes) {
      Json rec{{"object", w.object}};
      if (w.kind == scene::DeferredWrite::Kind::Transform) {
        rec["kind"] = "transform";
        rec["pos"] = jsonio::vec3_json(w.transform.position);
        rec["orient"] = jsonio::quat_json(w.transform.orientation);
      } else {
        rec["kind"] = "flag";
        rec["flag"] = std::string(scene::to_string(w.flag));
        rec["value"] = w.value;
      }
      written.push_back(std::move(rec));
    }
    record["writes"] = std::move(written);

    record["picks"] = Json{{"target", current_pick_ ? Json(*current_pick_) : Json(nullptr)}};
    const scene::Transform& vp = world_.scene.viewpoint();
    record["viewpoint"] = Json{{"pos", jsonio::vec3_json(vp.position)},
                               {"orient", jsonio::quat_json(vp.orientation)}};
    record["deliveries"] = report.deliveries;
    record["writesApplied"] = report.writes_applied;
    record["quit"] = report.quit;

    out << record.dump() << '\n';
    ++result.steps_executed;
    if (observer) observer(*this, report, record);
    if (report.quit) {
      result.quit = true;
      break;
    }
  }
  return result;
}

RunResult run_file(const LoadedWorld& world, const dsl::FactoryRegistry& registry,
                   const RunConfig& config) {
  if (config.trace_path.empty()) fail(Err::InvalidParam, "trace path must not be empty");
  Script script =
      config.script_path.empty() ? Script{} : load_script_file(config.script_path);
  Runner runner(world, registry, std::move(script), config);

  std::remove(config.trace_path.c_str());
  const std::string tmp = config.trace_path + ".tmp";
  RunResult result;
  try {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(Err::Io, "cannot open '" + tmp + "' for writing");
    result = runner.run(out);
    out.flush();
    if (!out) fail(Err::Io, "cannot write '" + tmp + "'");
  } catch (...) {
    std::remove(tmp.c_str());
    throw;
  }
  if (std::rename(tmp.c_str(), config.trace_path.c_str()) != 0) {
    std::remove(tmp.c_str());
    fail(Err::Io, "cannot move trace into '" + config.trace_path + "'");
  }
  return result;
}

RunResult run_string(const LoadedWorld& world, const dsl::FactoryRegistry& registry,
                     const RunConfig& config, std::string& trace_out) {
  Script script =
      config.script_path.empty() ? Script{} : load_script_file(config.script_path);
  Runner runner(world, registry, std::move(script), config);
  std::ostringstream out;
  const RunResult result = runner.run(out);
  trace_out = std::move(out).str();
  return result;
}

}  // namespace itflow::harness
