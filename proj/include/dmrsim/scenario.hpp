#pragma once

#include "dmrsim/metrics.hpp"
#include "dmrsim/simulation.hpp"
#include "dmrsim/workload.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dmrsim::scenario
{
    /// Everything needed to run an experiment: cluster, workload source,
    /// policy, cost and application parameters, and output options.
    struct Scenario
    {
        std::string name = "scenario";
        simcore::SimConfig sim;
        workload::WorkloadParams workload;
        bool has_workload = false;         // set once any workload parameter is given
        std::optional<std::string> replay; // path of a serialized workload
        bool paired = false;               // also run the all-fixed variant
        std::string out_dir = "out";
        std::vector<std::uint64_t> seeds;  // sweep; empty means workload.seed
        std::optional<SimTime> until;

        /// Throws ErrorCode::InvalidArgument unless exactly one workload source
        /// is present and every parameter is in range.
        void validate() const;

        std::vector<std::uint64_t> effective_seeds() const;
    };

    /// Parses flat `key = value` text with optional sections ([cluster],
    /// [workload], [policy], [cost], [run], [app.<name>]) on top of the
    /// defaults. '#' and ';' start comments. Errors carry the line number.
    Scenario parse_config(std::string_view text, bool validate = true);

    /// Applies config text on top of an existing scenario without validating.
    void apply_config(Scenario &scenario, std::string_view text);

    Scenario load_config(const std::string &path, bool validate = true);

    void apply_config_file(Scenario &scenario, const std::string &path);

    /// Sets one parameter. `key` is either "section.name" or a bare name from
    /// the cluster, workload, policy, cost or run sections.
    void set_value(Scenario &scenario, std::string_view key, std::string_view value);

    /// Switches the workload source to a replay file.
    void set_replay(Scenario &scenario, std::string path);

    /// Name of the environment variable overriding the inhibitor period
    /// ("none" or seconds) for every application.
    inline constexpr const char *check_period_env = "DMRSIM_CHECK_PERIOD";

    /// Applies the environment override; returns true when it was set.
    bool apply_env(Scenario &scenario);

    /// Canonical text form; parse_config(format_config(s)) reproduces s.
    std::string format_config(const Scenario &scenario);

    /// The documented defaults as config text.
    std::string default_config_text();

    std::vector<std::string> preset_names();

    /// Config text of a shipped preset; throws ErrorCode::InvalidArgument for an unknown name.
    std::string preset_text(std::string_view name);

    Scenario load_preset(std::string_view name);

    /// Generated or replayed jobs for one seed.
    std::vector<workload::JobDescriptor> materialize(const Scenario &scenario, std::uint64_t seed);

    struct RunOutputs
    {
        std::uint64_t seed = 0;
        std::string workload_text;
        simcore::RunResult flexible;
        std::optional<simcore::RunResult> fixed;
        std::optional<metrics::GainReport> gains;
    };

    /// Runs one seed in memory.
    RunOutputs simulate(const Scenario &scenario, std::uint64_t seed, bool trace = true);

    /// Writes trace, CSVs, decision log, audit and workload files into `dir`.
    void write_outputs(const RunOutputs &outputs, const std::string &dir);

    std::string summary_csv(const RunOutputs &outputs);

    /// Flattened summary rows: run label -> metric -> value.
    std::map<std::string, std::map<std::string, std::string>> summary_table(const RunOutputs &outputs);

    /// Runs every seed (in parallel when there are several) and writes the
    /// outputs under scenario.out_dir, one subdirectory per seed when sweeping.
    std::vector<RunOutputs> run_scenario(const Scenario &scenario);

    /// Short human-readable report of finished runs.
    std::string report(const Scenario &scenario, const std::vector<RunOutputs> &runs);
} // namespace dmrsim::scenario
