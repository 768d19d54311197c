#include "doctest.h"

#include "dmrsim/error.hpp"
#include "dmrsim/scenario.hpp"

#include <cstdlib>
#include <functional>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dmrsim;
using namespace dmrsim::scenario;
namespace fs = std::filesystem;

namespace
{
    std::string slurp(const fs::path &p)
    {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream s;
        s << in.rdbuf();
        return s.str();
    }

    ErrorCode code_of(const std::function<void()> &f)
    {
        try
        {
            f();
        }
        catch (const Error &e)
        {
            return e.code();
        }
        FAIL("no error raised");
        return ErrorCode::InvalidArgument;
    }

    std::string message_of(const std::function<void()> &f)
    {
        try
        {
            f();
        }
        catch (const Error &e)
        {
            return e.what();
        }
        return {};
    }

    fs::path scratch(const std::string &name)
    {
        const fs::path p = fs::current_path() / "scenario_scratch" / name;
        fs::remove_all(p);
        return p;
    }
} // namespace

TEST_CASE("jobs alone gives every documented default")
{
    const Scenario s = parse_config("jobs = 10\n");
    CHECK(s.workload.jobs == 10);
    CHECK(s.sim.nodes == 20);
    CHECK(s.sim.policy.mode == simcore::SchedulingMode::Sync);
    CHECK(s.sim.policy.expand_timeout == seconds(40));
    CHECK(s.workload.mean_interarrival == 10.0);
    CHECK(s.workload.flexible_ratio == 1.0);
    CHECK(s.workload.max_step_runtime == 60.0);
    CHECK(s.workload.seed == 1);
    CHECK_FALSE(s.replay);
    CHECK_FALSE(s.paired);
    CHECK(s.effective_seeds() == std::vector<std::uint64_t>{1});
}

TEST_CASE("sections, comments and values")
{
    const Scenario s = parse_config("# experiment\n"
                                    "[cluster]\n"
                                    "nodes = 32 ; wider\n"
                                    "[workload]\n"
                                    "jobs = 50\n"
                                    "app_mix = FS:0.5,CG:0.5\n"
                                    "[policy]\n"
                                    "mode = async\n"
                                    "inhibitor = 5\n"
                                    "[run]\n"
                                    "seeds = 1-3\n"
                                    "[app.cg]\n"
                                    "check_period = none\n");
    CHECK(s.sim.nodes == 32);
    CHECK(s.sim.policy.mode == simcore::SchedulingMode::Async);
    CHECK(s.workload.app_mix[0] == 0.5);
    CHECK(s.workload.app_mix[1] == 0.5);
    CHECK(s.workload.app_mix[3] == 0.0);
    REQUIRE(s.sim.policy.inhibitor_period);
    CHECK(*s.sim.policy.inhibitor_period == seconds(5));
    CHECK(s.effective_seeds() == std::vector<std::uint64_t>{1, 2, 3});
    CHECK_FALSE(s.sim.apps.at(AppKind::CG).check_period);
}

TEST_CASE("out-of-range values are rejected")
{
    CHECK(code_of([] { parse_config("jobs = 10\nflexible_ratio = 1.5\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_config("jobs = 10\nnodes = 0\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_config("jobs = 10\nmode = later\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { parse_config("jobs = ten\n"); }) == ErrorCode::Parse);
}

TEST_CASE("parse errors name the offending line")
{
    const std::string msg = message_of([] { parse_config("jobs = 10\n\nbogus = 3\n"); });
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("bogus") != std::string::npos);
    CHECK(message_of([] { parse_config("[nowhere]\n"); }).find("line 1") != std::string::npos);
    CHECK(message_of([] { parse_config("jobs 10\n"); }).find("line 1") != std::string::npos);
}

TEST_CASE("exactly one workload source")
{
    CHECK(message_of([] { parse_config("nodes = 20\n"); }).find("missing required field: jobs") != std::string::npos);
    CHECK(message_of([] { parse_config("jobs = 10\nreplay = w.txt\n"); }).find("mutually exclusive") !=
          std::string::npos);
    Scenario s = parse_config("replay = w.txt\n");
    CHECK(s.replay == std::string("w.txt"));
    CHECK_NOTHROW(parse_config("", false));
}

TEST_CASE("formatted config parses back to the same scenario")
{
    Scenario s = parse_config("jobs = 77\nnodes = 24\nmode = async\npaired = true\nseeds = 1,4,9\n"
                              "bandwidth = 1e9\nflexible_ratio = 0.25\niterations = 40\n");
    const std::string text = format_config(s);
    const Scenario back = parse_config(text);
    CHECK(format_config(back) == text);
    CHECK(back.workload.jobs == 77);
    CHECK(back.sim.nodes == 24);
    CHECK(back.paired);
    CHECK(back.workload.iterations == 40);
    CHECK(back.sim.cost.bandwidth == 1e9);
    CHECK(back.effective_seeds() == std::vector<std::uint64_t>{1, 4, 9});

    const Scenario defaults = parse_config(default_config_text(), false);
    CHECK(format_config(defaults) == default_config_text());
}

TEST_CASE("set_value takes qualified and bare keys")
{
    Scenario s = parse_config("jobs = 5\n");
    set_value(s, "policy.mode", "async");
    set_value(s, "nodes", "40");
    set_value(s, "app.nbody.max_procs", "8");
    CHECK(s.sim.policy.mode == simcore::SchedulingMode::Async);
    CHECK(s.sim.nodes == 40);
    CHECK(s.sim.apps.at(AppKind::Nbody).max_procs == 8);
    CHECK(code_of([&] { set_value(s, "nope", "1"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("every preset parses and validates")
{
    const auto names = preset_names();
    CHECK(names.size() >= 10);
    for (const std::string &n : names)
    {
        CAPTURE(n);
        CHECK_NOTHROW(load_preset(n));
    }
    CHECK(code_of([] { preset_text("no-such-preset"); }) == ErrorCode::InvalidArgument);
    CHECK(load_preset("async-50").sim.policy.mode == simcore::SchedulingMode::Async);
    CHECK(load_preset("sync-50").workload.jobs == 50);
}

TEST_CASE("environment overrides the inhibitor period")
{
    Scenario s = parse_config("jobs = 5\n");
    unsetenv(check_period_env);
    CHECK_FALSE(apply_env(s));
    setenv(check_period_env, "7.5", 1);
    CHECK(apply_env(s));
    REQUIRE(s.sim.policy.inhibitor_period);
    CHECK(*s.sim.policy.inhibitor_period == seconds(7.5));
    setenv(check_period_env, "none", 1);
    CHECK(apply_env(s));
    CHECK_FALSE(*s.sim.policy.inhibitor_period);
    setenv(check_period_env, "soon", 1);
    CHECK(code_of([&] { apply_env(s); }) == ErrorCode::InvalidArgument);
    unsetenv(check_period_env);
}

TEST_CASE("a run writes its outputs and is byte-for-byte reproducible")
{
    Scenario s = parse_config("jobs = 30\npaired = true\n");
    s.out_dir = scratch("a").string();
    run_scenario(s);
    const fs::path a(s.out_dir);
    for (const char *f : {"workload.txt", "summary.csv", "trace.txt", "decisions.txt", "jobs.csv", "timeline.csv",
                          "actions.csv", "audit.txt", "trace_fixed.txt", "jobs_fixed.csv", "paired_diff.csv"})
    {
        CAPTURE(f);
        CHECK(fs::exists(a / f));
    }
    s.out_dir = scratch("b").string();
    run_scenario(s);
    const fs::path b(s.out_dir);
    for (const char *f : {"summary.csv", "trace.txt", "decisions.txt", "jobs.csv"})
    {
        CAPTURE(f);
        CHECK(slurp(a / f) == slurp(b / f));
    }
    CHECK(slurp(a / "summary.csv").find("gain,makespan_pct,") != std::string::npos);
    CHECK(slurp(a / "audit.txt").find("violations=0\n") != std::string::npos);
}

TEST_CASE("replaying a saved workload reproduces the summary")
{
    Scenario gen = parse_config("jobs = 25\nseed = 4\nmode = async\n");
    const RunOutputs first = simulate(gen, 4);
    const fs::path dir = scratch("replay");
    fs::create_directories(dir);
    const fs::path wl = dir / "workload.txt";
    std::ofstream(wl) << first.workload_text;

    Scenario rep = parse_config("replay = " + wl.string() + "\nmode = async\n");
    const RunOutputs second = simulate(rep, 4);
    CHECK(summary_csv(first) == summary_csv(second));
    CHECK(first.flexible.trace == second.flexible.trace);

    Scenario missing = parse_config("replay = " + (dir / "absent.txt").string() + "\n");
    CHECK(code_of([&] { simulate(missing, 1); }) == ErrorCode::Io);
}

TEST_CASE("seed sweeps write one directory per seed")
{
    Scenario s = parse_config("jobs = 10\nseeds = 2-4\n");
    s.out_dir = scratch("sweep").string();
    const auto runs = run_scenario(s);
    REQUIRE(runs.size() == 3);
    for (const std::uint64_t seed : {2, 3, 4})
    {
        CHECK(fs::exists(fs::path(s.out_dir) / ("seed-" + std::to_string(seed)) / "summary.csv"));
    }
    CHECK(fs::exists(fs::path(s.out_dir) / "sweep.csv"));
    CHECK(runs[0].seed == 2);
    CHECK(report(s, runs).find("seed 3") != std::string::npos);
}

TEST_CASE("unwritable output directory is an io error")
{
    const fs::path root = scratch("blocked");
    fs::create_directories(root);
    std::ofstream(root / "file") << "x";
    Scenario s = parse_config("jobs = 3\n");
    s.out_dir = (root / "file" / "sub").string();
    CHECK(code_of([&] { run_scenario(s); }) == ErrorCode::Io);
}
