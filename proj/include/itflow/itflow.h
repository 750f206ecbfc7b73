/* C interface to the itflow runtime: load a world description, check its
 * diagnostics, and run it against a script, producing a JSONL trace. */
#ifndef ITFLOW_H
#define ITFLOW_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum itf_status {
  ITF_OK = 0,
  ITF_ERROR_ARGUMENT = 1,
  ITF_ERROR_IO = 2,
  ITF_ERROR_PARSE = 3,
  ITF_ERROR_VALIDATE = 4,
  ITF_ERROR_RUN = 5
} itf_status;

/* Opaque handle to a loaded world description. */
typedef struct itf_world itf_world;

const char* itf_version(void);

/* Message for the most recent failure on this thread. */
const char* itf_last_error(void);

/* Loading succeeds even when the world has validation diagnostics; inspect
 * them with itf_world_diagnostic before running. */
itf_status itf_world_load_file(const char* path, itf_world** out_world);
itf_status itf_world_load_text(const char* text, const char* origin, itf_world** out_world);
void itf_world_free(itf_world* world);

size_t itf_world_diagnostic_count(const itf_world* world);

/* Returns "origin:line: Code: message", owned by the world. NULL when the
 * index is out of range. */
const char* itf_world_diagnostic(const itf_world* world, size_t index);

typedef struct itf_run_config {
  const char* script_path; /* NULL runs without input */
  const char* trace_path;  /* required by itf_run */
  int steps;
  double dt;     /* <= 0 selects 1/60 */
  uint64_t seed; /* recorded in the trace header */
} itf_run_config;

typedef struct itf_run_stats {
  int steps_executed;
  int quit;
} itf_run_stats;

/* Runs the world and writes the trace to config->trace_path. The file only
 * appears when the whole run succeeds. out_stats may be NULL. */
itf_status itf_run(itf_world* world, const itf_run_config* config, itf_run_stats* out_stats);

/* Same run with the trace returned as a malloc'd string; release it with
 * itf_string_free. */
itf_status itf_run_trace(itf_world* world, const itf_run_config* config, char** out_trace,
                         itf_run_stats* out_stats);

void itf_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* ITFLOW_H */
