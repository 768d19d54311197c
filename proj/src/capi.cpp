#include "dmrsim.h"

#include "dmrsim/error.hpp"
#include "dmrsim/scenario.hpp"

#include <cstring>
#include <memory>
#include <new>
#include <sstream>
#include <string>

struct dmrsim_scenario
{
    dmrsim::scenario::Scenario value;
};

struct dmrsim_result
{
    dmrsim::scenario::Scenario scenario;
    std::vector<dmrsim::scenario::RunOutputs> runs;
};

namespace
{
    thread_local std::string last_error;

    dmrsim_status code_of(dmrsim::ErrorCode code)
    {
        switch (code)
        {
        case dmrsim::ErrorCode::InvalidArgument:
            return DMRSIM_E_INVALID_ARGUMENT;
        case dmrsim::ErrorCode::Domain:
            return DMRSIM_E_DOMAIN;
        case dmrsim::ErrorCode::Causality:
            return DMRSIM_E_CAUSALITY;
        case dmrsim::ErrorCode::Contract:
            return DMRSIM_E_CONTRACT;
        case dmrsim::ErrorCode::Parse:
            return DMRSIM_E_PARSE;
        case dmrsim::ErrorCode::Io:
            return DMRSIM_E_IO;
        }
        return DMRSIM_E_INTERNAL;
    }

    template <typename F>
    dmrsim_status guarded(F &&body)
    {
        try
        {
            last_error.clear();
            body();
            return DMRSIM_OK;
        }
        catch (const dmrsim::Error &e)
        {
            last_error = e.what();
            return code_of(e.code());
        }
        catch (const std::bad_alloc &)
        {
            last_error = "out of memory";
            return DMRSIM_E_INTERNAL;
        }
        catch (const std::exception &e)
        {
            last_error = e.what();
            return DMRSIM_E_INTERNAL;
        }
        catch (...)
        {
            last_error = "unknown error";
            return DMRSIM_E_INTERNAL;
        }
    }

    void require(const void *p, const char *what)
    {
        if (!p)
        {
            throw dmrsim::invalid_argument(std::string(what) + " must not be null");
        }
    }

    void copy_out(const std::string &text, char *buf, size_t cap, size_t *needed)
    {
        if (needed)
        {
            *needed = text.size();
        }
        if (buf && cap > 0)
        {
            const size_t n = text.size() < cap - 1 ? text.size() : cap - 1;
            std::memcpy(buf, text.data(), n);
            buf[n] = '\0';
        }
    }

    const dmrsim::scenario::RunOutputs &run_at(const dmrsim_result *r, size_t index)
    {
        require(r, "result");
        if (index >= r->runs.size())
        {
            throw dmrsim::invalid_argument("result index out of range");
        }
        return r->runs[index];
    }

    std::string artifact(const dmrsim_result *r, size_t index, const std::string &name)
    {
        using namespace dmrsim;
        const scenario::RunOutputs &o = run_at(r, index);
        if (name == "summary")
        {
            return scenario::summary_csv(o);
        }
        if (name == "report")
        {
            return scenario::report(r->scenario, {o});
        }
        if (name == "workload")
        {
            return o.workload_text;
        }
        std::string base = name;
        const simcore::RunResult *run = &o.flexible;
        const std::string suffix = "_fixed";
        if (base.size() > suffix.size() && base.compare(base.size() - suffix.size(), suffix.size(), suffix) == 0)
        {
            base.resize(base.size() - suffix.size());
            if (!o.fixed)
            {
                throw invalid_argument("result has no fixed run");
            }
            run = &*o.fixed;
        }
        std::ostringstream out;
        if (base == "trace")
        {
            return run->trace;
        }
        if (base == "decisions")
        {
            return simcore::format_decision_log(run->summary.actions);
        }
        if (base == "jobs")
        {
            metrics::write_jobs_csv(out, run->summary);
        }
        else if (base == "timeline")
        {
            metrics::write_timeline_csv(out, run->summary);
        }
        else if (base == "actions")
        {
            metrics::write_actions_csv(out, run->summary);
        }
        else
        {
            throw invalid_argument("unknown artifact '" + name + "'");
        }
        return out.str();
    }
} // namespace

extern "C" {

const char *dmrsim_version(void)
{
    return "1.0.0";
}

const char *dmrsim_status_name(dmrsim_status status)
{
    switch (status)
    {
    case DMRSIM_OK:
        return "ok";
    case DMRSIM_E_INVALID_ARGUMENT:
        return "invalid argument";
    case DMRSIM_E_PARSE:
        return "parse error";
    case DMRSIM_E_IO:
        return "i/o error";
    case DMRSIM_E_DOMAIN:
        return "domain error";
    case DMRSIM_E_CAUSALITY:
        return "causality violation";
    case DMRSIM_E_CONTRACT:
        return "contract violation";
    case DMRSIM_E_INTERNAL:
        return "internal error";
    }
    return "unknown status";
}

const char *dmrsim_last_error(void)
{
    return last_error.c_str();
}

dmrsim_status dmrsim_scenario_new(dmrsim_scenario **out)
{
    return guarded([&] {
        require(out, "out");
        *out = new dmrsim_scenario{};
    });
}

dmrsim_status dmrsim_scenario_from_text(const char *text, dmrsim_scenario **out)
{
    return guarded([&] {
        require(text, "text");
        require(out, "out");
        *out = new dmrsim_scenario{dmrsim::scenario::parse_config(text)};
    });
}

dmrsim_status dmrsim_scenario_from_file(const char *path, dmrsim_scenario **out)
{
    return guarded([&] {
        require(path, "path");
        require(out, "out");
        *out = new dmrsim_scenario{dmrsim::scenario::load_config(path)};
    });
}

dmrsim_status dmrsim_scenario_from_preset(const char *name, dmrsim_scenario **out)
{
    return guarded([&] {
        require(name, "name");
        require(out, "out");
        *out = new dmrsim_scenario{dmrsim::scenario::load_preset(name)};
    });
}

void dmrsim_scenario_free(dmrsim_scenario *scenario)
{
    delete scenario;
}

dmrsim_status dmrsim_scenario_apply_text(dmrsim_scenario *scenario, const char *text)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(text, "text");
        dmrsim::scenario::apply_config(scenario->value, text);
    });
}

dmrsim_status dmrsim_scenario_apply_file(dmrsim_scenario *scenario, const char *path)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(path, "path");
        dmrsim::scenario::apply_config_file(scenario->value, path);
    });
}

dmrsim_status dmrsim_scenario_apply_preset(dmrsim_scenario *scenario, const char *name)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(name, "name");
        dmrsim::scenario::apply_config(scenario->value, dmrsim::scenario::preset_text(name));
    });
}

dmrsim_status dmrsim_scenario_set(dmrsim_scenario *scenario, const char *key, const char *value)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(key, "key");
        require(value, "value");
        dmrsim::scenario::set_value(scenario->value, key, value);
    });
}

dmrsim_status dmrsim_scenario_set_replay(dmrsim_scenario *scenario, const char *path)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(path, "path");
        dmrsim::scenario::set_replay(scenario->value, path);
    });
}

dmrsim_status dmrsim_scenario_apply_env(dmrsim_scenario *scenario, int *applied)
{
    return guarded([&] {
        require(scenario, "scenario");
        const bool set = dmrsim::scenario::apply_env(scenario->value);
        if (applied)
        {
            *applied = set ? 1 : 0;
        }
    });
}

dmrsim_status dmrsim_scenario_validate(const dmrsim_scenario *scenario)
{
    return guarded([&] {
        require(scenario, "scenario");
        scenario->value.validate();
    });
}

dmrsim_status dmrsim_scenario_text(const dmrsim_scenario *scenario, char *buf, size_t cap, size_t *needed)
{
    return guarded([&] {
        require(scenario, "scenario");
        copy_out(dmrsim::scenario::format_config(scenario->value), buf, cap, needed);
    });
}

dmrsim_status dmrsim_simulate(const dmrsim_scenario *scenario, uint64_t seed, dmrsim_result **out)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(out, "out");
        auto result = std::make_unique<dmrsim_result>();
        result->scenario = scenario->value;
        result->runs.push_back(dmrsim::scenario::simulate(scenario->value, seed));
        *out = result.release();
    });
}

dmrsim_status dmrsim_run(const dmrsim_scenario *scenario, dmrsim_result **out)
{
    return guarded([&] {
        require(scenario, "scenario");
        require(out, "out");
        auto result = std::make_unique<dmrsim_result>();
        result->scenario = scenario->value;
        result->runs = dmrsim::scenario::run_scenario(scenario->value);
        *out = result.release();
    });
}

void dmrsim_result_free(dmrsim_result *result)
{
    delete result;
}

size_t dmrsim_result_count(const dmrsim_result *result)
{
    return result ? result->runs.size() : 0;
}

uint64_t dmrsim_result_seed(const dmrsim_result *result, size_t index)
{
    if (!result || index >= result->runs.size())
    {
        return 0;
    }
    return result->runs[index].seed;
}

dmrsim_status dmrsim_result_metric(const dmrsim_result *result, size_t index, const char *run, const char *metric,
                                   double *value)
{
    return guarded([&] {
        require(run, "run");
        require(metric, "metric");
        require(value, "value");
        const auto table = dmrsim::scenario::summary_table(run_at(result, index));
        const auto r = table.find(run);
        if (r == table.end())
        {
            throw dmrsim::invalid_argument(std::string("no run '") + run + "' in result");
        }
        std::string name = metric;
        auto m = r->second.find(name);
        if (m == r->second.end() && std::string(run) == "gain")
        {
            m = r->second.find(name + "_pct");
        }
        if (m == r->second.end())
        {
            throw dmrsim::invalid_argument(std::string("no metric '") + metric + "' for run '" + run + "'");
        }
        if (m->second.empty())
        {
            throw dmrsim::domain_error(std::string("metric '") + metric + "' is undefined for this run");
        }
        *value = std::stod(m->second);
    });
}

size_t dmrsim_result_violations(const dmrsim_result *result)
{
    if (!result)
    {
        return 0;
    }
    size_t total = 0;
    for (const auto &r : result->runs)
    {
        total += r.flexible.audit.violations.size();
        if (r.fixed)
        {
            total += r.fixed->audit.violations.size();
        }
    }
    return total;
}

dmrsim_status dmrsim_result_text(const dmrsim_result *result, size_t index, const char *name, char *buf, size_t cap,
                                 size_t *needed)
{
    return guarded([&] {
        require(name, "name");
        copy_out(artifact(result, index, name), buf, cap, needed);
    });
}

dmrsim_status dmrsim_defaults_text(char *buf, size_t cap, size_t *needed)
{
    return guarded([&] { copy_out(dmrsim::scenario::default_config_text(), buf, cap, needed); });
}

dmrsim_status dmrsim_preset_names(char *buf, size_t cap, size_t *needed)
{
    return guarded([&] {
        std::string text;
        for (const std::string &n : dmrsim::scenario::preset_names())
        {
            text += n;
            text += '\n';
        }
        copy_out(text, buf, cap, needed);
    });
}

dmrsim_status dmrsim_preset_text(const char *name, char *buf, size_t cap, size_t *needed)
{
    return guarded([&] {
        require(name, "name");
        copy_out(dmrsim::scenario::preset_text(name), buf, cap, needed);
    });
}

} // extern "C"
