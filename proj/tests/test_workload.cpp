#include "doctest.h"

#include "dmrsim/error.hpp"
#include "dmrsim/workload.hpp"

#include <cmath>
#include <map>
#include <vector>

using namespace dmrsim;
using namespace dmrsim::workload;

namespace
{
    struct Moments
    {
        double mean = 0.0;
        double cv = 0.0;
    };

    Moments moments(const std::vector<double> &xs)
    {
        double sum = 0.0;
        for (const double x : xs)
        {
            sum += x;
        }
        const double mean = sum / xs.size();
        double var = 0.0;
        for (const double x : xs)
        {
            var += (x - mean) * (x - mean);
        }
        var /= xs.size();
        return {mean, std::sqrt(var) / mean};
    }

    WorkloadParams fs_params(std::uint32_t jobs, std::uint64_t seed = 1)
    {
        WorkloadParams p;
        p.jobs = jobs;
        p.seed = seed;
        return p;
    }
} // namespace

TEST_CASE("zero jobs gives an empty workload")
{
    CHECK(generate_workload(fs_params(0)).empty());
}

TEST_CASE("generation is deterministic per seed")
{
    const auto a = generate_workload(fs_params(200, 11));
    const auto b = generate_workload(fs_params(200, 11));
    const auto c = generate_workload(fs_params(200, 12));
    CHECK(a == b);
    CHECK(a != c);
    CHECK(serialize_workload(a) == serialize_workload(b));
}

TEST_CASE("arrivals are strictly increasing with the configured mean gap")
{
    const auto jobs = generate_workload(fs_params(100000, 5));
    REQUIRE(jobs.size() == 100000);
    std::vector<double> gaps;
    gaps.reserve(jobs.size());
    SimTime prev = SimTime::zero();
    for (std::size_t i = 0; i < jobs.size(); ++i)
    {
        if (i > 0)
        {
            REQUIRE(jobs[i].arrival > jobs[i - 1].arrival);
        }
        gaps.push_back((jobs[i].arrival - prev).seconds());
        prev = jobs[i].arrival;
    }
    const Moments m = moments(gaps);
    CHECK(std::abs(m.mean - 10.0) / 10.0 < 0.02);
    // Exponential gaps have coefficient of variation 1.
    CHECK(m.cv == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("flexible ratio boundaries")
{
    WorkloadParams p = fs_params(500);
    p.flexible_ratio = 1.0;
    for (const auto &j : generate_workload(p))
    {
        CHECK(j.flexible);
    }
    p.flexible_ratio = 0.0;
    for (const auto &j : generate_workload(p))
    {
        CHECK_FALSE(j.flexible);
    }
}

TEST_CASE("flexible sets are nested across ratios and leave the rest of the workload untouched")
{
    WorkloadParams p = fs_params(400, 3);
    p.flexible_ratio = 0.25;
    const auto low = generate_workload(p);
    p.flexible_ratio = 0.75;
    const auto high = generate_workload(p);
    std::size_t n_low = 0;
    std::size_t n_high = 0;
    for (std::size_t i = 0; i < low.size(); ++i)
    {
        if (low[i].flexible)
        {
            CHECK(high[i].flexible);
        }
        n_low += low[i].flexible;
        n_high += high[i].flexible;
    }
    CHECK(n_low < n_high);
    CHECK(fingerprint(low) == fingerprint(high));
}

TEST_CASE("job sizes stay in range and favour powers of two")
{
    RngStream one(1);
    for (int i = 0; i < 1000; ++i)
    {
        CHECK(sample_job_size(one, 1, 0.3) == 1);
    }

    RngStream rng(2);
    std::map<int, int> counts;
    for (int i = 0; i < 100000; ++i)
    {
        const int s = sample_job_size(rng, 20, 0.3);
        REQUIRE(s >= 1);
        REQUIRE(s <= 20);
        ++counts[s];
    }
    // Each power of two is more frequent than both neighbours.
    for (const int p : {4, 8, 16})
    {
        CHECK(counts[p] > counts[p - 1]);
        CHECK(counts[p] > counts[p + 1]);
    }
}

TEST_CASE("step runtimes are clamped and hyperexponential")
{
    WorkloadParams p = fs_params(1);
    RngStream rng(9);
    std::vector<double> xs;
    for (int i = 0; i < 100000; ++i)
    {
        const SimTime t = sample_step_runtime(4, rng, p);
        REQUIRE(t > SimTime::zero());
        REQUIRE(t <= seconds(60));
        xs.push_back(t.seconds());
    }
    CHECK(moments(xs).cv > 1.0);

    // Unclamped, equal branch means: plain exponential.
    WorkloadParams flat = fs_params(1);
    flat.runtime_branch_ratio = 1.0;
    flat.max_step_runtime = 1e9;
    RngStream rng2(10);
    xs.clear();
    for (int i = 0; i < 100000; ++i)
    {
        xs.push_back(sample_step_runtime(4, rng2, flat).seconds());
    }
    CHECK(moments(xs).cv == doctest::Approx(1.0).epsilon(0.03));
}

TEST_CASE("larger jobs get longer steps on average")
{
    WorkloadParams p = fs_params(1);
    p.max_step_runtime = 1e9;
    RngStream a(4);
    RngStream b(4);
    double small = 0.0;
    double large = 0.0;
    for (int i = 0; i < 20000; ++i)
    {
        small += sample_step_runtime(1, a, p).seconds();
        large += sample_step_runtime(20, b, p).seconds();
    }
    // Short-branch means 5 s and 15 s; both scale by 0.7 + 0.3 * 4 = 1.9.
    CHECK(small / 20000 == doctest::Approx(9.5).epsilon(0.05));
    CHECK(large / 20000 == doctest::Approx(28.5).epsilon(0.05));
}

TEST_CASE("application mix and per-application shape")
{
    WorkloadParams p = fs_params(2000, 8);
    p.app_mix = {0.25, 0.25, 0.25, 0.25};
    std::map<AppKind, int> counts;
    for (const auto &j : generate_workload(p))
    {
        ++counts[j.app];
        CHECK_NOTHROW(j.validate());
        if (j.app == AppKind::CG || j.app == AppKind::Jacobi)
        {
            CHECK(j.initial_size == 32);
            CHECK(j.min_procs == 2);
            CHECK(j.preferred_procs == 8);
            CHECK(j.iterations == 10000);
        }
        if (j.app == AppKind::Nbody)
        {
            CHECK(j.initial_size == 16);
            CHECK(j.preferred_procs == 1);
            CHECK(j.iterations == 25);
        }
        if (j.app == AppKind::FS)
        {
            CHECK(j.iterations == 25);
            CHECK(j.max_procs == 20);
            CHECK_FALSE(j.preferred_procs);
        }
    }
    for (const auto &[app, n] : counts)
    {
        CHECK(n == doctest::Approx(500).epsilon(0.15));
    }
}

TEST_CASE("invalid parameters are rejected")
{
    WorkloadParams p = fs_params(10);
    p.flexible_ratio = 1.5;
    CHECK_THROWS_AS(p.validate(), Error);
    p = fs_params(10);
    p.mean_interarrival = 0.0;
    CHECK_THROWS_AS(p.validate(), Error);
    p = fs_params(10);
    p.app_mix = {0, 0, 0, 0};
    CHECK_THROWS_AS(p.validate(), Error);
    p = fs_params(10);
    p.factor = 1;
    CHECK_THROWS_AS(p.validate(), Error);
}

TEST_CASE("serialized workloads parse back identically")
{
    WorkloadParams p = fs_params(300, 21);
    p.app_mix = {0.4, 0.2, 0.2, 0.2};
    p.flexible_ratio = 0.5;
    const auto jobs = generate_workload(p);
    const std::string text = serialize_workload(jobs);
    const auto back = parse_workload(text);
    CHECK(back == jobs);
    CHECK(serialize_workload(back) == text);
}

TEST_CASE("workload parse errors name the line")
{
    const std::string header = "# id,arrival,size,min,max,preferred,factor,flexible,app,iterations,step_time,data_volume\n";
    const std::string good = "1,0.000000,2,1,20,-,2,1,FS,25,3.000000,1024\n";
    CHECK_NOTHROW(parse_workload(header + good));

    auto error_of = [](const std::string &text) {
        try
        {
            parse_workload(text);
        }
        catch (const Error &e)
        {
            CHECK(e.code() == ErrorCode::Parse);
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(error_of(header + good + "2,1.0,2,1,20\n").find("line 3") != std::string::npos);
    CHECK(error_of(header + good + good).find("line 3") != std::string::npos);
    CHECK(error_of(header + "1,0.0,2,1,20,-,2,1,XX,25,3.0,1024\n").find("line 2") != std::string::npos);
    CHECK(error_of(header + "1,0.0,0,1,20,-,2,1,FS,25,3.0,1024\n").find("line 2") != std::string::npos);
}

TEST_CASE("as_fixed clears only the flexible flag")
{
    const auto jobs = generate_workload(fs_params(50, 4));
    const auto fixed = as_fixed(jobs);
    REQUIRE(fixed.size() == jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i)
    {
        CHECK_FALSE(fixed[i].flexible);
        auto copy = fixed[i];
        copy.flexible = jobs[i].flexible;
        CHECK(copy == jobs[i]);
    }
    CHECK(fingerprint(fixed) == fingerprint(jobs));
    CHECK(fingerprint(jobs) != fingerprint(generate_workload(fs_params(50, 5))));
}
