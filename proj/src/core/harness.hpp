#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "devices.hpp"
#include "dsl.hpp"
#include "flow.hpp"
#include "jsonio.hpp"

namespace itflow::harness {

std::uint64_t fnv1a64(std::string_view data);
std::string hex64(std::uint64_t value);

std::string read_file(const std::string& path);

enum class DirectiveAction { Enable, Disable, DisconnectNode, Connect, SetSelectionIT, SetParam };

std::string_view to_string(DirectiveAction action);

// A scripted change to the running graph, applied at the start of the first
// step whose time reaches `at`.
struct Directive {
  double at = 0.0;
  DirectiveAction action = DirectiveAction::Enable;
  std::map<std::string, std::string> args;
  int line = 0;
};

struct Script {
  std::vector<DeviceSample> samples;  // file order; timestamps checked per device
  std::vector<Directive> directives;  // `at` must be non-decreasing
};

// One JSON object per line: either a device sample
//   {"t":0.1,"device":"tracker","kind":"locator","pos":[0,0,0],"orient":[1,0,0,0]}
// or a directive
//   {"at":1.0,"directive":"connect","origin":"a","srcport":"out","dest":"b","dstport":"in"}
Script load_script(std::string_view text);
Script load_script_file(const std::string& path);

struct LoadedWorld {
  dsl::WorldSpec spec;
  std::string text;
  std::string origin;
  std::vector<dsl::Diagnostic> diagnostics;
};

LoadedWorld load_world_text(std::string text, std::string origin,
                            const dsl::FactoryRegistry& registry);
LoadedWorld load_world_file(const std::string& path, const dsl::FactoryRegistry& registry);

struct RunConfig {
  std::string script_path;  // empty runs without input
  std::string trace_path;
  int steps = 0;
  double dt = 1.0 / 60.0;
  std::uint64_t seed = 0;
};

struct RunResult {
  int steps_executed = 0;
  bool quit = false;
};

// Drives a world step by step, feeding scripted samples through the device
// queue and writing one trace record per step.
class Runner {
 public:
  using Observer =
      std::function<void(Runner&, const flow::StepReport&, const jsonio::Json& record)>;

  Runner(const LoadedWorld& world, const dsl::FactoryRegistry& registry, Script script,
         const RunConfig& config);

  // Writes the header line plus one record per step; returns the run outcome.
  RunResult run(std::ostream& out, const Observer& observer = {});

  flow::Dataflow& flow() { return world_.flow; }
  scene::SceneState& scene() { return world_.scene; }
  const jsonio::Json& header() const { return header_; }

 private:
  void apply_directive(const Directive& d);

  dsl::World world_;
  devices::DeviceQueue queue_;
  Script script_;
  RunConfig config_;
  flow::SingleStepModel model_;
  jsonio::Json header_;
  std::optional<std::string> current_pick_;
};

// Runs with the trace going to `config.trace_path`; the file appears only
// when the whole run succeeds.
RunResult run_file(const LoadedWorld& world, const dsl::FactoryRegistry& registry,
                   const RunConfig& config);

// Same run with the trace returned as a string.
RunResult run_string(const LoadedWorld& world, const dsl::FactoryRegistry& registry,
                     const RunConfig& config, std::string& trace_out);

}  // namespace itflow::harness
