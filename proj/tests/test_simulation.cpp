#include "doctest.h"

#include "dmrsim/error.hpp"
#include "dmrsim/simulation.hpp"

using namespace dmrsim;
using namespace dmrsim::simcore;

namespace
{
    workload::JobDescriptor fs_job(JobId id, double arrival, int size, int iterations, double step, bool flexible,
                                   int min = 1, int max = 20)
    {
        workload::JobDescriptor j;
        j.id = id;
        j.arrival = seconds(arrival);
        j.initial_size = size;
        j.min_procs = flexible ? min : size;
        j.max_procs = flexible ? max : size;
        j.flexible = flexible;
        j.iterations = iterations;
        j.base_step_time = seconds(step);
        j.data_volume = 0;
        return j;
    }

    SimConfig config(int nodes, SchedulingMode mode = SchedulingMode::Sync)
    {
        SimConfig c;
        c.nodes = nodes;
        c.policy.mode = mode;
        c.trace = true;
        return c;
    }

    RunResult run(const SimConfig &c, std::vector<workload::JobDescriptor> jobs)
    {
        return Simulation(c, std::move(jobs)).run();
    }

    const metrics::JobTiming &timing(const RunResult &r, JobId id)
    {
        for (const auto &j : r.summary.jobs)
        {
            if (j.id == id)
            {
                return j;
            }
        }
        FAIL("no such job");
        return r.summary.jobs.front();
    }
} // namespace

TEST_CASE("empty workload")
{
    const RunResult r = run(config(20), {});
    CHECK(r.summary.makespan == SimTime::zero());
    CHECK_FALSE(r.summary.utilization);
    CHECK(r.summary.jobs_completed == 0);
    CHECK(r.audit.ok());
}

TEST_CASE("a single fixed job runs undisturbed")
{
    const RunResult r = run(config(20), {fs_job(1, 0, 1, 1, 60, false)});
    CHECK(r.summary.makespan == seconds(60));
    CHECK(r.summary.mean_wait == 0.0);
    CHECK(r.summary.mean_exec == doctest::Approx(60.0));
    REQUIRE(r.summary.utilization);
    CHECK(r.summary.utilization->avg == doctest::Approx(5.0));
    CHECK(r.summary.actions.empty());
    CHECK(r.audit.ok());
}

TEST_CASE("fixed jobs queue in arrival order")
{
    const RunResult r = run(config(20), {fs_job(1, 0, 20, 2, 10, false), fs_job(2, 5, 20, 1, 10, false)});
    CHECK(timing(r, 2).start == seconds(20));
    CHECK(timing(r, 2).wait() == seconds(15));
    CHECK(r.summary.makespan == seconds(30));
    CHECK(r.summary.utilization->avg == doctest::Approx(100.0));
}

TEST_CASE("jobs larger than the cluster never start")
{
    const RunResult r = run(config(20), {fs_job(1, 0, 32, 1, 10, false), fs_job(2, 1, 4, 1, 10, false)});
    CHECK(r.summary.jobs_unschedulable == 1);
    CHECK(r.summary.jobs_completed == 1);
    CHECK(timing(r, 1).unschedulable);
    CHECK(r.trace.find("unschedulable job=1 size=32") != std::string::npos);
}

TEST_CASE("synchronous expansion on an idle cluster")
{
    const SimConfig c = config(20);
    const RunResult r = run(c, {fs_job(1, 0, 4, 3, 40, true, 1, 16)});
    const SimTime ovh = appmodel::scheduling_overhead(16, c.cost);
    // 40 s at 4 nodes, decide and grow to 16, then two 10 s steps with one more check between.
    CHECK(r.summary.makespan == seconds(60) + ovh * 2);
    REQUIRE(r.summary.actions.size() == 2);
    CHECK(r.summary.actions[0].kind == ActionKind::Expand);
    CHECK(r.summary.actions[0].target == 16);
    CHECK(r.summary.actions[0].reason == Reason::WideOptExpand);
    CHECK(r.summary.actions[0].outcome == metrics::Outcome::Applied);
    CHECK(r.summary.actions[0].duration == ovh);
    CHECK(r.summary.actions[1].kind == ActionKind::None);
    CHECK(timing(r, 1).resizes == 1);
    CHECK(r.audit.ok());
    CHECK(r.audit.wide_expand_decisions == 1);
}

TEST_CASE("asynchronous decisions are applied one step later")
{
    const RunResult r = run(config(20, SchedulingMode::Async), {fs_job(1, 0, 4, 3, 40, true, 1, 16)});
    // Decided at t=0, applied at t=40; the last step never checks.
    REQUIRE(r.summary.actions.size() == 2);
    const auto &first = r.summary.actions[0];
    CHECK(first.time == SimTime::zero());
    CHECK(first.deferred);
    CHECK(first.applied_at == seconds(40));
    CHECK(first.target == 16);
    CHECK(r.summary.actions[1].time == seconds(40));
    CHECK(r.summary.actions[1].kind == ActionKind::None);
    CHECK(r.summary.makespan == seconds(60));
    for (const auto &a : r.summary.actions)
    {
        CHECK(a.outcome != metrics::Outcome::Pending);
    }
    CHECK(r.audit.ok());
}

TEST_CASE("shrinking lets a waiting job start and boosts it")
{
    const SimConfig c = config(16);
    const RunResult r = run(c, {fs_job(1, 0, 16, 3, 10, true, 1, 16), fs_job(2, 5, 8, 1, 10, false)});
    REQUIRE_FALSE(r.summary.actions.empty());
    const auto &shrink = r.summary.actions[0];
    CHECK(shrink.kind == ActionKind::Shrink);
    CHECK(shrink.target == 8);
    CHECK(shrink.boosted == JobId{2});
    const SimTime ovh = appmodel::scheduling_overhead(16, c.cost);
    const SimTime cost = appmodel::resize_cost(0, 16, 8, c.cost);
    CHECK(timing(r, 2).start == seconds(10) + ovh + cost);
    CHECK(r.audit.ok());
    CHECK(r.audit.shrink_decisions == 1);
    CHECK(r.trace.find("boost=2") != std::string::npos);
}

TEST_CASE("an expansion that cannot be granted times out and the job carries on")
{
    SimConfig c = config(20, SchedulingMode::Async);
    const RunResult r =
        run(c, {fs_job(1, 0, 2, 3, 100, true, 1, 16), fs_job(2, 10, 16, 1, 1000, false)});
    REQUIRE_FALSE(r.summary.actions.empty());
    const auto &first = r.summary.actions[0];
    CHECK(first.kind == ActionKind::Expand);
    CHECK(first.target == 16);
    CHECK(first.outcome == metrics::Outcome::TimedOut);
    CHECK(first.duration == c.policy.expand_timeout);
    CHECK(r.trace.find("resizer-timeout job=1") != std::string::npos);
    CHECK(timing(r, 1).finish);
    CHECK(r.audit.ok());
}

TEST_CASE("runs are deterministic")
{
    workload::WorkloadParams p;
    p.jobs = 60;
    p.seed = 3;
    const auto jobs = workload::generate_workload(p);
    for (const SchedulingMode mode : {SchedulingMode::Sync, SchedulingMode::Async})
    {
        const RunResult a = run(config(20, mode), jobs);
        const RunResult b = run(config(20, mode), jobs);
        CHECK(a.trace == b.trace);
        CHECK(a.summary.makespan == b.summary.makespan);
        CHECK(a.audit.ok());
        CHECK(a.events_processed + a.events_cancelled == a.events_scheduled);
        CHECK(a.summary.jobs_completed == jobs.size());
    }
}

TEST_CASE("the run stops at the requested time")
{
    const RunResult r = Simulation(config(20), {fs_job(1, 0, 1, 1, 60, false)}).run(seconds(30));
    CHECK_FALSE(timing(r, 1).finish);
    CHECK(r.summary.jobs_completed == 0);
}

TEST_CASE("invalid configurations are rejected")
{
    SimConfig c = config(0);
    CHECK_THROWS_AS(Simulation(c, {}), Error);
    c = config(20);
    c.policy.expand_timeout = SimTime::zero();
    CHECK_THROWS_AS(Simulation(c, {}), Error);
    CHECK_THROWS_AS(Simulation(config(20), {fs_job(1, 0, 2, 1, 1, false), fs_job(1, 1, 2, 1, 1, false)}), Error);
}

TEST_CASE("decision log lines")
{
    const RunResult r = run(config(20, SchedulingMode::Async), {fs_job(1, 0, 4, 3, 40, true, 1, 16)});
    const std::string log = format_decision_log(r.summary.actions);
    CHECK(log.find("job=1 expand 4->16") != std::string::npos);
    CHECK(log.find("applied=40.000000") != std::string::npos);
}
