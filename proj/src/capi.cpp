#include "itflow/itflow.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>
#include <vector>

#include "core/errors.hpp"
#include "core/harness.hpp"
#include "core/version.hpp"

using namespace itflow;

struct itf_world {
  harness::LoadedWorld loaded;
  dsl::FactoryRegistry registry = dsl::FactoryRegistry::with_builtins();
  std::vector<std::string> diagnostics;
};

namespace {

thread_local std::string g_last_error;

itf_status status_for(Err code) {
  switch (code) {
    case Err::Io:
      return ITF_ERROR_IO;
    case Err::XmlSyntax:
    case Err::UnknownElement:
    case Err::MissingAttribute:
    case Err::DuplicateName:
    case Err::ParseError:
      return ITF_ERROR_PARSE;
    case Err::ValidationFailed:
      return ITF_ERROR_VALIDATE;
    default:
      return ITF_ERROR_RUN;
  }
}

itf_status fail_status(const Error& e) {
  g_last_error = e.what();
  return status_for(e.code());
}

itf_status fail_argument(const char* message) {
  g_last_error = message;
  return ITF_ERROR_ARGUMENT;
}

template <typename Load>
itf_status load_world(itf_world** out_world, Load&& load) {
  *out_world = nullptr;
  auto world = std::make_unique<itf_world>();
  try {
    world->loaded = load(world->registry);
  } catch (const Error& e) {
    return fail_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ITF_ERROR_RUN;
  }
  for (const dsl::Diagnostic& d : world->loaded.diagnostics)
    world->diagnostics.push_back(dsl::format_diagnostic(world->loaded.origin, d));
  *out_world = world.release();
  return ITF_OK;
}

harness::RunConfig to_config(const itf_run_config* config) {
  harness::RunConfig out;
  if (config->script_path) out.script_path = config->script_path;
  if (config->trace_path) out.trace_path = config->trace_path;
  out.steps = config->steps;
  out.dt = config->dt > 0.0 ? config->dt : 1.0 / 60.0;
  out.seed = config->seed;
  return out;
}

itf_status check_runnable(itf_world* world, const itf_run_config* config) {
  if (!world || !config) return fail_argument("world and config must not be NULL");
  if (config->steps < 0) return fail_argument("steps must not be negative");
  if (!world->diagnostics.empty()) {
    g_last_error = world->diagnostics.front();
    return ITF_ERROR_VALIDATE;
  }
  return ITF_OK;
}

void fill_stats(itf_run_stats* out_stats, const harness::RunResult& result) {
  if (!out_stats) return;
  out_stats->steps_executed = result.steps_executed;
  out_stats->quit = result.quit ? 1 : 0;
}

}  // namespace

extern "C" {

const char* itf_version(void) { return kVersion; }

const char* itf_last_error(void) { return g_last_error.c_str(); }

itf_status itf_world_load_file(const char* path, itf_world** out_world) {
  if (!path || !out_world) return fail_argument("path and out_world must not be NULL");
  return load_world(out_world, [path](const dsl::FactoryRegistry& reg) {
    return harness::load_world_file(path, reg);
  });
}

itf_status itf_world_load_text(const char* text, const char* origin, itf_world** out_world) {
  if (!text || !out_world) return fail_argument("text and out_world must not be NULL");
  return load_world(out_world, [&](const dsl::FactoryRegistry& reg) {
    return harness::load_world_text(text, origin ? origin : "<memory>", reg);
  });
}

void itf_world_free(itf_world* world) { delete world; }

size_t itf_world_diagnostic_count(const itf_world* world) {
  return world ? world->diagnostics.size() : 0;
}

const char* itf_world_diagnostic(const itf_world* world, size_t index) {
  if (!world || index >= world->diagnostics.size()) return nullptr;
  return world->diagnostics[index].c_str();
}

itf_status itf_run(itf_world* world, const itf_run_config* config, itf_run_stats* out_stats) {
  if (const itf_status s = check_runnable(world, config); s != ITF_OK) return s;
  if (!config->trace_path) return fail_argument("trace_path must not be NULL");
  try {
    const harness::RunResult result =
        harness::run_file(world->loaded, world->registry, to_config(config));
    fill_stats(out_stats, result);
  } catch (const Error& e) {
    return fail_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ITF_ERROR_RUN;
  }
  return ITF_OK;
}

itf_status itf_run_trace(itf_world* world, const itf_run_config* config, char** out_trace,
                         itf_run_stats* out_stats) {
  if (!out_trace) return fail_argument("out_trace must not be NULL");
  *out_trace = nullptr;
  if (const itf_status s = check_runnable(world, config); s != ITF_OK) return s;
  try {
    std::string trace;
    const harness::RunResult result =
        harness::run_string(world->loaded, world->registry, to_config(config), trace);
    char* buf = static_cast<char*>(std::malloc(trace.size() + 1));
    if (!buf) {
      g_last_error = "out of memory";
      return ITF_ERROR_RUN;
    }
    std::memcpy(buf, trace.c_str(), trace.size() + 1);
    *out_trace = buf;
    fill_stats(out_stats, result);
  } catch (const Error& e) {
    return fail_status(e);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ITF_ERROR_RUN;
  }
  return ITF_OK;
}

void itf_string_free(char* text) { std::free(text); }

}  // extern "C"
