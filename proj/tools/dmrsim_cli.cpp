#include "dmrsim.h"

#include "CLI11.hpp"

#include <cstdio>
#include <string>
#include <vector>

namespace
{
    constexpr int exit_config = 1;
    constexpr int exit_run = 2;
    constexpr int exit_audit = 3;

    template <typename Getter>
    std::string fetch(Getter get)
    {
        size_t needed = 0;
        if (get(nullptr, 0, &needed) != DMRSIM_OK)
        {
            return {};
        }
        std::string out(needed + 1, '\0');
        get(out.data(), out.size(), &needed);
        out.resize(needed);
        return out;
    }

    int fail(dmrsim_status status, int code)
    {
        std::fprintf(stderr, "dmrsim: %s: %s\n", dmrsim_status_name(status), dmrsim_last_error());
        return code;
    }

    struct ScenarioHandle
    {
        dmrsim_scenario *p = nullptr;
        ~ScenarioHandle() { dmrsim_scenario_free(p); }
    };

    struct ResultHandle
    {
        dmrsim_result *p = nullptr;
        ~ResultHandle() { dmrsim_result_free(p); }
    };
} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Discrete-event simulator of a cluster running malleable and fixed jobs"};
    app.set_version_flag("--version", dmrsim_version());

    std::string config;
    std::string preset;
    std::string replay;
    std::string out;
    std::string mode;
    std::string seeds;
    std::vector<std::string> sets;
    std::uint64_t seed = 0;
    bool paired = false;
    bool print_defaults = false;
    bool list_presets = false;
    bool show_config = false;
    bool quiet = false;

    app.add_option("--config", config, "Scenario configuration file")->check(CLI::ExistingFile);
    app.add_option("--preset", preset, "Start from a shipped preset (see --list-presets)");
    auto *seed_opt = app.add_option("--seed", seed, "Workload seed (replaces any seed sweep)");
    app.add_option("--seeds", seeds, "Seed sweep, e.g. 1-10 or 1,5,9");
    app.add_option("--mode", mode, "Scheduling mode")->check(CLI::IsMember({"sync", "async"}));
    app.add_flag("--paired", paired, "Also run the all-fixed variant and report gains");
    app.add_option("--out", out, "Output directory");
    app.add_option("--replay", replay, "Replay a serialized workload instead of generating one")
        ->check(CLI::ExistingFile);
    app.add_option("--set", sets, "Override a parameter, key=value (repeatable)");
    app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");
    app.add_flag("--list-presets", list_presets, "List shipped presets and exit");
    app.add_flag("--show-config", show_config, "Print the resolved configuration and exit");
    app.add_flag("-q,--quiet", quiet, "Do not print the run report");

    CLI11_PARSE(app, argc, argv);

    if (print_defaults)
    {
        std::fputs(fetch([](char *b, size_t c, size_t *n) { return dmrsim_defaults_text(b, c, n); }).c_str(), stdout);
        return 0;
    }
    if (list_presets)
    {
        std::fputs(fetch([](char *b, size_t c, size_t *n) { return dmrsim_preset_names(b, c, n); }).c_str(), stdout);
        return 0;
    }

    ScenarioHandle scenario;
    dmrsim_status st = dmrsim_scenario_new(&scenario.p);
    if (st != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (!preset.empty() && (st = dmrsim_scenario_apply_preset(scenario.p, preset.c_str())) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (!config.empty() && (st = dmrsim_scenario_apply_file(scenario.p, config.c_str())) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    for (const std::string &kv : sets)
    {
        const std::size_t eq = kv.find('=');
        if (eq == std::string::npos)
        {
            std::fprintf(stderr, "dmrsim: --set expects key=value, got '%s'\n", kv.c_str());
            return exit_config;
        }
        const std::string key = kv.substr(0, eq);
        const std::string value = kv.substr(eq + 1);
        if ((st = dmrsim_scenario_set(scenario.p, key.c_str(), value.c_str())) != DMRSIM_OK)
        {
            return fail(st, exit_config);
        }
    }
    auto set = [&](const char *key, const std::string &value) {
        return dmrsim_scenario_set(scenario.p, key, value.c_str());
    };
    if (*seed_opt && ((st = set("workload.seed", std::to_string(seed))) != DMRSIM_OK ||
                      (st = set("run.seeds", "none")) != DMRSIM_OK))
    {
        return fail(st, exit_config);
    }
    if (!seeds.empty() && (st = set("run.seeds", seeds)) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (!mode.empty() && (st = set("policy.mode", mode)) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (paired && (st = set("run.paired", "true")) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (!out.empty() && (st = set("run.out", out)) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (!replay.empty() && (st = dmrsim_scenario_set_replay(scenario.p, replay.c_str())) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    int env_applied = 0;
    if ((st = dmrsim_scenario_apply_env(scenario.p, &env_applied)) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if ((st = dmrsim_scenario_validate(scenario.p)) != DMRSIM_OK)
    {
        return fail(st, exit_config);
    }
    if (show_config)
    {
        std::fputs(fetch([&](char *b, size_t c, size_t *n) { return dmrsim_scenario_text(scenario.p, b, c, n); })
                       .c_str(),
                   stdout);
        return 0;
    }

    ResultHandle result;
    if ((st = dmrsim_run(scenario.p, &result.p)) != DMRSIM_OK)
    {
        return fail(st, st == DMRSIM_E_PARSE ? exit_config : exit_run);
    }
    if (!quiet)
    {
        if (env_applied)
        {
            std::puts("inhibitor period taken from DMRSIM_CHECK_PERIOD");
        }
        for (size_t i = 0; i < dmrsim_result_count(result.p); ++i)
        {
            const std::string text = fetch(
                [&](char *b, size_t c, size_t *n) { return dmrsim_result_text(result.p, i, "report", b, c, n); });
            // Every per-seed report repeats the scenario header line; print it once.
            const std::size_t nl = text.find('\n');
            std::fputs((i == 0 || nl == std::string::npos ? text : text.substr(nl + 1)).c_str(), stdout);
        }
    }
    const size_t violations = dmrsim_result_violations(result.p);
    if (violations > 0)
    {
        std::fprintf(stderr, "dmrsim: trace audit found %zu violation(s); see audit*.txt\n", violations);
        return exit_audit;
    }
    return 0;
}
