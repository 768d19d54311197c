#include "dmrsim.h"

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

static int failures = 0;
static int checks = 0;

#define EXPECT(cond)                                                                                                   \
    do                                                                                                                 \
    {                                                                                                                  \
        ++checks;                                                                                                      \
        if (!(cond))                                                                                                   \
        {                                                                                                              \
            ++failures;                                                                                                \
            fprintf(stderr, "%s:%d: check failed: %s (last error: %s)\n", __FILE__, __LINE__, #cond,                  \
                    dmrsim_last_error());                                                                              \
        }                                                                                                              \
    } while (0)

static int fabs_diff_ok(double a, double b)
{
    const double d = a - b;
    return d < 1e-4 && d > -1e-4;
}

static char *result_text(const dmrsim_result *r, size_t index, const char *name)
{
    size_t needed = 0;
    if (dmrsim_result_text(r, index, name, NULL, 0, &needed) != DMRSIM_OK)
    {
        return NULL;
    }
    char *buf = malloc(needed + 1);
    dmrsim_result_text(r, index, name, buf, needed + 1, &needed);
    return buf;
}

static void test_library(void)
{
    EXPECT(strlen(dmrsim_version()) > 0);
    EXPECT(strcmp(dmrsim_status_name(DMRSIM_OK), "ok") == 0);
    EXPECT(strcmp(dmrsim_status_name(DMRSIM_E_PARSE), "parse error") == 0);

    size_t needed = 0;
    EXPECT(dmrsim_defaults_text(NULL, 0, &needed) == DMRSIM_OK);
    EXPECT(needed > 100);
    char small[8];
    EXPECT(dmrsim_defaults_text(small, sizeof small, &needed) == DMRSIM_OK);
    EXPECT(strlen(small) == sizeof small - 1);

    char names[1024];
    EXPECT(dmrsim_preset_names(names, sizeof names, NULL) == DMRSIM_OK);
    EXPECT(strstr(names, "sync-50\n") != NULL);
    EXPECT(dmrsim_preset_text("no-such", names, sizeof names, NULL) == DMRSIM_E_INVALID_ARGUMENT);
}

static void test_errors(void)
{
    dmrsim_scenario *s = NULL;
    EXPECT(dmrsim_scenario_new(NULL) == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(dmrsim_scenario_from_text("jobs = 5\nbogus = 1\n", &s) == DMRSIM_E_PARSE);
    EXPECT(s == NULL);
    EXPECT(strstr(dmrsim_last_error(), "line 2") != NULL);
    EXPECT(dmrsim_scenario_from_text("jobs = 5\nflexible_ratio = 2\n", &s) == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(dmrsim_scenario_from_file("/nonexistent/dir/x.conf", &s) == DMRSIM_E_IO);

    EXPECT(dmrsim_scenario_new(&s) == DMRSIM_OK);
    EXPECT(dmrsim_scenario_validate(s) == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(strstr(dmrsim_last_error(), "jobs") != NULL);
    EXPECT(dmrsim_scenario_set(s, "nodes", "many") == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(dmrsim_scenario_set(s, NULL, "1") == DMRSIM_E_INVALID_ARGUMENT);
    dmrsim_result *r = NULL;
    EXPECT(dmrsim_simulate(s, 1, &r) == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(r == NULL);
    dmrsim_scenario_free(s);
    dmrsim_scenario_free(NULL);
    dmrsim_result_free(NULL);
}

static void test_simulate(void)
{
    dmrsim_scenario *s = NULL;
    EXPECT(dmrsim_scenario_new(&s) == DMRSIM_OK);
    EXPECT(dmrsim_scenario_set(s, "jobs", "20") == DMRSIM_OK);
    EXPECT(dmrsim_scenario_set(s, "run.paired", "true") == DMRSIM_OK);
    EXPECT(dmrsim_scenario_validate(s) == DMRSIM_OK);

    dmrsim_result *r = NULL;
    EXPECT(dmrsim_simulate(s, 7, &r) == DMRSIM_OK);
    EXPECT(dmrsim_result_count(r) == 1);
    EXPECT(dmrsim_result_seed(r, 0) == 7);
    EXPECT(dmrsim_result_violations(r) == 0);

    double sync_makespan = 0.0;
    double fixed_makespan = 0.0;
    double gain = 0.0;
    double jobs = 0.0;
    EXPECT(dmrsim_result_metric(r, 0, "sync", "makespan", &sync_makespan) == DMRSIM_OK);
    EXPECT(dmrsim_result_metric(r, 0, "fixed", "makespan", &fixed_makespan) == DMRSIM_OK);
    EXPECT(dmrsim_result_metric(r, 0, "gain", "makespan", &gain) == DMRSIM_OK);
    EXPECT(dmrsim_result_metric(r, 0, "sync", "jobs", &jobs) == DMRSIM_OK);
    EXPECT(jobs == 20.0);
    EXPECT(sync_makespan > 0.0);
    EXPECT(fabs_diff_ok(gain, (fixed_makespan - sync_makespan) / fixed_makespan * 100.0));
    EXPECT(dmrsim_result_metric(r, 0, "sync", "nonsense", &gain) == DMRSIM_E_INVALID_ARGUMENT);
    EXPECT(dmrsim_result_metric(r, 3, "sync", "makespan", &gain) == DMRSIM_E_INVALID_ARGUMENT);

    char *summary = result_text(r, 0, "summary");
    char *trace = result_text(r, 0, "trace");
    char *fixed_trace = result_text(r, 0, "trace_fixed");
    EXPECT(summary && strncmp(summary, "run,metric,value\n", 17) == 0);
    EXPECT(trace && strstr(trace, "JobArrival job=1") != NULL);
    EXPECT(fixed_trace && strstr(fixed_trace, "decide") == NULL);
    EXPECT(result_text(r, 0, "nothing") == NULL);

    /* Same seed, same bytes. */
    dmrsim_result *again = NULL;
    EXPECT(dmrsim_simulate(s, 7, &again) == DMRSIM_OK);
    char *trace2 = result_text(again, 0, "trace");
    EXPECT(trace && trace2 && strcmp(trace, trace2) == 0);

    free(summary);
    free(trace);
    free(fixed_trace);
    free(trace2);
    dmrsim_result_free(again);
    dmrsim_result_free(r);
    dmrsim_scenario_free(s);
}

static void test_text_round_trip(void)
{
    dmrsim_scenario *s = NULL;
    EXPECT(dmrsim_scenario_from_preset("async-25", &s) == DMRSIM_OK);
    size_t needed = 0;
    EXPECT(dmrsim_scenario_text(s, NULL, 0, &needed) == DMRSIM_OK);
    char *text = malloc(needed + 1);
    EXPECT(dmrsim_scenario_text(s, text, needed + 1, NULL) == DMRSIM_OK);
    EXPECT(strstr(text, "mode = async") != NULL);

    dmrsim_scenario *copy = NULL;
    EXPECT(dmrsim_scenario_from_text(text, &copy) == DMRSIM_OK);
    char *text2 = malloc(needed + 1);
    EXPECT(dmrsim_scenario_text(copy, text2, needed + 1, NULL) == DMRSIM_OK);
    EXPECT(strcmp(text, text2) == 0);

    free(text);
    free(text2);
    dmrsim_scenario_free(copy);
    dmrsim_scenario_free(s);
}

int main(void)
{
    test_library();
    test_errors();
    test_simulate();
    test_text_round_trip();
    printf("%d/%d checks passed\n", checks - failures, checks);
    return failures == 0 ? 0 : 1;
}
