#pragma once

#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace dmrsim::metrics
{
    struct JobTiming
    {
        JobId id = 0;
        AppKind app = AppKind::FS;
        bool flexible = false;
        bool unschedulable = false;
        SimTime arrival;
        std::optional<SimTime> start;
        std::optional<SimTime> finish;
        int resizes = 0;

        bool completed() const noexcept { return start && finish; }
        SimTime wait() const { return start.value() - arrival; }
        SimTime exec() const { return finish.value() - start.value(); }
        SimTime completion() const { return finish.value() - arrival; }
    };

    /// State of the cluster from `time` until the next point.
    struct TimelinePoint
    {
        SimTime time;
        int allocated = 0;
        int running = 0;
        int completed = 0;
    };

    enum class Outcome : std::uint8_t
    {
        Applied,
        TimedOut,  // expansion whose resizer job was cancelled at its deadline
        Discarded, // pending action dropped because the job finished
        Pending,
    };

    std::string_view to_string(Outcome outcome) noexcept;

    /// One forwarded check and what became of its decision.
    struct ActionRecord
    {
        SimTime time; // decision time
        JobId job = 0;
        ActionKind kind = ActionKind::None;
        int from = 0;
        int target = 0;
        Reason reason = Reason::NoChange;
        std::optional<JobId> boosted;
        bool deferred = false; // asynchronous: applied at the next reconfiguring point
        SimTime overhead;      // scheduling time of the decision itself
        std::optional<SimTime> applied_at;
        SimTime duration; // sync: decision to resumed step; async: application to resumed step
        Outcome outcome = Outcome::Pending;
    };

    struct ActionStats
    {
        std::uint64_t count = 0;
        double per_job = 0.0;
        double min = 0.0; // seconds
        double max = 0.0;
        double avg = 0.0;
        double std = 0.0;
    };

    struct UtilizationStats
    {
        double avg = 0.0; // percent
        double std = 0.0; // percent
    };

    struct RunSummary
    {
        std::string label;
        int total_nodes = 0;
        std::uint64_t workload_fingerprint = 0;
        SimTime first_arrival;
        SimTime makespan;
        std::optional<UtilizationStats> utilization;
        std::vector<JobTiming> jobs;
        std::vector<TimelinePoint> timeline;
        std::vector<ActionRecord> actions;
        std::array<ActionStats, 3> action_stats{}; // indexed by ActionKind
        std::uint64_t forwarded_checks = 0;
        std::uint64_t inhibited_checks = 0;
        std::size_t jobs_completed = 0;
        std::size_t jobs_unschedulable = 0;
        double mean_wait = 0.0; // seconds, over completed jobs
        double mean_exec = 0.0;
        double mean_completion = 0.0;

        const ActionStats &stats(ActionKind kind) const { return action_stats[static_cast<std::size_t>(kind)]; }
    };

    /// Time-weighted mean and standard deviation of allocated / total over
    /// [start, start + makespan]; absent when makespan is zero.
    std::optional<UtilizationStats> utilization(std::span<const TimelinePoint> timeline, SimTime start,
                                                SimTime makespan, int total_nodes);

    ActionStats action_stats(std::span<const ActionRecord> actions, ActionKind kind, std::size_t jobs);

    /// Fills makespan, utilisation, means and action statistics from jobs,
    /// timeline and actions.
    void finalize(RunSummary &summary);

    struct PairedDifference
    {
        JobId job = 0;
        double wait = 0.0; // fixed - flexible, seconds
        double exec = 0.0;
        double completion = 0.0;
    };

    struct GainReport
    {
        // (fixed - flexible) / fixed * 100
        double makespan = 0.0;
        double wait = 0.0;
        double exec = 0.0;
        double completion = 0.0;
        std::vector<PairedDifference> per_job;
    };

    /// Throws ErrorCode::InvalidArgument when the two runs were not over the same workload.
    GainReport gain_report(const RunSummary &fixed, const RunSummary &flexible);

    double gain_percent(double fixed, double flexible);

    void write_jobs_csv(std::ostream &out, const RunSummary &summary);
    void write_timeline_csv(std::ostream &out, const RunSummary &summary);
    void write_actions_csv(std::ostream &out, const RunSummary &summary);

    /// Long format: run,metric,value.
    void write_summary_header(std::ostream &out);
    void write_summary_rows(std::ostream &out, const RunSummary &summary);
    void write_gain_rows(std::ostream &out, const GainReport &gains);
} // namespace dmrsim::metrics
