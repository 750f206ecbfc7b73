#include <cstdio>
#include <string>

#include <CLI11.hpp>

#include <itflow/itflow.h>

namespace {

int cmd_validate(const std::string& world_path) {
  itf_world* world = nullptr;
  if (itf_world_load_file(world_path.c_str(), &world) != ITF_OK) {
    std::fprintf(stderr, "%s\n", itf_last_error());
    return 2;
  }
  const size_t count = itf_world_diagnostic_count(world);
  for (size_t i = 0; i < count; ++i)
    std::fprintf(stderr, "%s\n", itf_world_diagnostic(world, i));
  itf_world_free(world);
  return count == 0 ? 0 : 1;
}

int cmd_run(const std::string& world_path, const std::string& script, const std::string& trace,
            int steps, double dt, std::uint64_t seed) {
  itf_world* world = nullptr;
  if (itf_world_load_file(world_path.c_str(), &world) != ITF_OK) {
    std::fprintf(stderr, "%s\n", itf_last_error());
    return 1;
  }
  const size_t count = itf_world_diagnostic_count(world);
  for (size_t i = 0; i < count; ++i)
    std::fprintf(stderr, "%s\n", itf_world_diagnostic(world, i));
  if (count != 0) {
    itf_world_free(world);
    return 1;
  }

  itf_run_config config{};
  config.script_path = script.empty() ? nullptr : script.c_str();
  config.trace_path = trace.empty() ? nullptr : trace.c_str();
  config.steps = steps;
  config.dt = dt;
  config.seed = seed;

  int rc = 0;
  if (trace.empty()) {
    char* text = nullptr;
    if (itf_run_trace(world, &config, &text, nullptr) == ITF_OK) {
      std::fputs(text, stdout);
      itf_string_free(text);
    } else {
      std::fprintf(stderr, "%s\n", itf_last_error());
      rc = 1;
    }
  } else if (itf_run(world, &config, nullptr) != ITF_OK) {
    std::fprintf(stderr, "%s\n", itf_last_error());
    rc = 1;
  }
  itf_world_free(world);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"itflow: run 3D interaction dataflow worlds"};
  app.set_version_flag("--version", std::string(itf_version()));
  app.require_subcommand(1);

  std::string world_path;
  std::string script;
  std::string trace;
  int steps = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;

  CLI::App* validate = app.add_subcommand("validate", "Check a world description");
  validate->add_option("world", world_path, "World XML file")->required();

  CLI::App* run = app.add_subcommand("run", "Run a world against a script");
  run->add_option("world", world_path, "World XML file")->required();
  run->add_option("--script", script, "Script JSONL file");
  run->add_option("--steps", steps, "Number of steps to run")->required();
  run->add_option("--dt", dt, "Step length in seconds (default 1/60)");
  run->add_option("--trace", trace, "Trace output file (default: stdout)");
  run->add_option("--seed", seed, "Seed recorded in the trace header");

  CLI11_PARSE(app, argc, argv);

  if (validate->parsed()) return cmd_validate(world_path);
  return cmd_run(world_path, script, trace, steps, dt, seed);
}
