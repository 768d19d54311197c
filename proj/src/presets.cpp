#include "dmrsim/error.hpp"
#include "dmrsim/scenario.hpp"

#include <array>

namespace dmrsim::scenario
{
    namespace
    {
        constexpr std::array<int, 6> sweep_sizes{10, 25, 50, 100, 200, 400};
        constexpr std::array<int, 5> hetero_ratios{0, 25, 50, 75, 100};
        constexpr std::array<const char *, 5> inhibitor_periods{"none", "2", "5", "10", "20"};

        std::string header(const std::string &name)
        {
            return "[run]\nname = " + name + "\nout = out/" + name + "\n";
        }

        std::string mode_sweep(const std::string &mode, int jobs)
        {
            const std::string name = mode + "-" + std::to_string(jobs);
            return header(name) + "paired = true\n\n[workload]\njobs = " + std::to_string(jobs) +
                   "\napp_mix = FS:1\n\n[policy]\nmode = " + mode + "\n";
        }

        std::string hetero(int ratio)
        {
            const std::string name = "hetero-" + std::to_string(ratio);
            char buf[16];
            std::snprintf(buf, sizeof buf, "%.2f", ratio / 100.0);
            return header(name) + "paired = true\n\n[workload]\njobs = 100\napp_mix = FS:1\nflexible_ratio = " + buf +
                   "\n\n[policy]\nmode = sync\n";
        }

        // Two-second steps: the short-branch mean m gives an overall step mean of
        // 0.7 m + 0.3 * 4 m = 1.9 m.
        std::string inhibitor(const std::string &period)
        {
            const std::string name = "inhibitor-" + period;
            return header(name) +
                   "paired = false\n\n[workload]\njobs = 50\napp_mix = FS:1\niterations = 300\n"
                   "runtime_mean_small = 1.05\nruntime_mean_large = 1.05\nmax_step_runtime = 6\n\n"
                   "[policy]\nmode = sync\ninhibitor = " +
                   period + "\n";
        }

        std::string overhead()
        {
            return header("overhead") + "paired = true\n\n[workload]\njobs = 50\napp_mix = FS:1\niterations = 2\n"
                                        "data_volume = 1073741824\n\n[policy]\nmode = sync\n";
        }
    } // namespace

    std::vector<std::string> preset_names()
    {
        std::vector<std::string> names;
        for (const char *mode : {"sync", "async"})
        {
            for (const int n : sweep_sizes)
            {
                names.push_back(std::string(mode) + "-" + std::to_string(n));
            }
        }
        for (const int r : hetero_ratios)
        {
            names.push_back("hetero-" + std::to_string(r));
        }
        for (const char *p : inhibitor_periods)
        {
            names.push_back(std::string("inhibitor-") + p);
        }
        names.push_back("overhead");
        return names;
    }

    std::string preset_text(std::string_view name)
    {
        for (const char *mode : {"sync", "async"})
        {
            for (const int n : sweep_sizes)
            {
                if (name == std::string(mode) + "-" + std::to_string(n))
                {
                    return mode_sweep(mode, n);
                }
            }
        }
        for (const int r : hetero_ratios)
        {
            if (name == "hetero-" + std::to_string(r))
            {
                return hetero(r);
            }
        }
        for (const char *p : inhibitor_periods)
        {
            if (name == std::string("inhibitor-") + p)
            {
                return inhibitor(p);
            }
        }
        if (name == "overhead")
        {
            return overhead();
        }
        throw invalid_argument("unknown preset '" + std::string(name) + "'");
    }
} // namespace dmrsim::scenario
