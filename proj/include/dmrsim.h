#ifndef DMRSIM_H
#define DMRSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(DMRSIM_BUILDING_LIBRARY)
#define DMRSIM_API __attribute__((visibility("default")))
#else
#define DMRSIM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmrsim_status
{
    DMRSIM_OK = 0,
    DMRSIM_E_INVALID_ARGUMENT = 1,
    DMRSIM_E_PARSE = 2,
    DMRSIM_E_IO = 3,
    DMRSIM_E_DOMAIN = 4,
    DMRSIM_E_CAUSALITY = 5,
    DMRSIM_E_CONTRACT = 6,
    DMRSIM_E_INTERNAL = 7
} dmrsim_status;

typedef struct dmrsim_scenario dmrsim_scenario;
typedef struct dmrsim_result dmrsim_result;

DMRSIM_API const char *dmrsim_version(void);
DMRSIM_API const char *dmrsim_status_name(dmrsim_status status);

/* Message of the last failed call on this thread; empty when none. */
DMRSIM_API const char *dmrsim_last_error(void);

/*
 * Text getters copy a NUL-terminated string into buf (truncated to cap) and
 * store the full length, excluding the terminator, in *needed when non-null.
 * Passing buf = NULL, cap = 0 only queries the length.
 */

/* A scenario holding the documented defaults; it has no workload yet. */
DMRSIM_API dmrsim_status dmrsim_scenario_new(dmrsim_scenario **out);

/* new + apply + validate in one call. */
DMRSIM_API dmrsim_status dmrsim_scenario_from_text(const char *text, dmrsim_scenario **out);
DMRSIM_API dmrsim_status dmrsim_scenario_from_file(const char *path, dmrsim_scenario **out);
DMRSIM_API dmrsim_status dmrsim_scenario_from_preset(const char *name, dmrsim_scenario **out);

DMRSIM_API void dmrsim_scenario_free(dmrsim_scenario *scenario);

/* Layer config text, a config file or a preset on top of the scenario. */
DMRSIM_API dmrsim_status dmrsim_scenario_apply_text(dmrsim_scenario *scenario, const char *text);
DMRSIM_API dmrsim_status dmrsim_scenario_apply_file(dmrsim_scenario *scenario, const char *path);
DMRSIM_API dmrsim_status dmrsim_scenario_apply_preset(dmrsim_scenario *scenario, const char *name);

/* key is "section.name" or a bare name; see dmrsim_defaults_text. */
DMRSIM_API dmrsim_status dmrsim_scenario_set(dmrsim_scenario *scenario, const char *key, const char *value);

/* Uses a serialized workload file instead of generated jobs. */
DMRSIM_API dmrsim_status dmrsim_scenario_set_replay(dmrsim_scenario *scenario, const char *path);

/* Honors DMRSIM_CHECK_PERIOD ("none" or seconds); *applied tells whether it was set. */
DMRSIM_API dmrsim_status dmrsim_scenario_apply_env(dmrsim_scenario *scenario, int *applied);

DMRSIM_API dmrsim_status dmrsim_scenario_validate(const dmrsim_scenario *scenario);

/* Canonical config text of the scenario. */
DMRSIM_API dmrsim_status dmrsim_scenario_text(const dmrsim_scenario *scenario, char *buf, size_t cap,
                                              size_t *needed);

/* Runs one seed in memory; no files are written. */
DMRSIM_API dmrsim_status dmrsim_simulate(const dmrsim_scenario *scenario, uint64_t seed, dmrsim_result **out);

/* Runs every configured seed and writes the outputs to the scenario's out directory. */
DMRSIM_API dmrsim_status dmrsim_run(const dmrsim_scenario *scenario, dmrsim_result **out);

DMRSIM_API void dmrsim_result_free(dmrsim_result *result);

DMRSIM_API size_t dmrsim_result_count(const dmrsim_result *result);
DMRSIM_API uint64_t dmrsim_result_seed(const dmrsim_result *result, size_t index);

/*
 * One summary value. run is the run label ("sync", "async", "fixed") or
 * "gain"; metric is a summary.csv metric name such as "makespan" or
 * "utilization_avg".
 */
DMRSIM_API dmrsim_status dmrsim_result_metric(const dmrsim_result *result, size_t index, const char *run,
                                              const char *metric, double *value);

/* Total trace-audit violations over every run in the result. */
DMRSIM_API size_t dmrsim_result_violations(const dmrsim_result *result);

/*
 * Text artifacts: "summary", "report", "workload", "trace", "decisions",
 * "jobs", "timeline", "actions", and the same with a "_fixed" suffix for
 * paired runs.
 */
DMRSIM_API dmrsim_status dmrsim_result_text(const dmrsim_result *result, size_t index, const char *name, char *buf,
                                            size_t cap, size_t *needed);

DMRSIM_API dmrsim_status dmrsim_defaults_text(char *buf, size_t cap, size_t *needed);

/* Newline-separated preset names. */
DMRSIM_API dmrsim_status dmrsim_preset_names(char *buf, size_t cap, size_t *needed);

DMRSIM_API dmrsim_status dmrsim_preset_text(const char *name, char *buf, size_t cap, size_t *needed);

#ifdef __cplusplus
}
#endif

#endif
