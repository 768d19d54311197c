#pragma once

#include "dmrsim/appmodel.hpp"
#include "dmrsim/dmr.hpp"
#include "dmrsim/event_queue.hpp"
#include "dmrsim/metrics.hpp"
#include "dmrsim/rms.hpp"
#include "dmrsim/workload.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace dmrsim::simcore
{
    enum class SchedulingMode : std::uint8_t
    {
        Sync,  // decided action applied at the same reconfiguring point
        Async, // decided during a step, applied at the next reconfiguring point
    };

    std::string_view to_string(SchedulingMode mode) noexcept;

    struct PolicyConfig
    {
        SchedulingMode mode = SchedulingMode::Sync;
        bool backfill = true;
        SimTime expand_timeout = SimTime::from_micros(40'000'000);
        rms::PolicyToggles toggles;

        /// When set, replaces every application's default inhibitor period; an
        /// empty inner value disables the inhibitor.
        std::optional<std::optional<SimTime>> inhibitor_period;
    };

    struct SimConfig
    {
        int nodes = 20;
        PolicyConfig policy;
        appmodel::CostModelParams cost;
        appmodel::AppCatalog apps;
        bool trace = false;       // event-by-event text trace
        bool trace_plans = false; // include redistribution plans in the trace
    };

    /// Findings of the trace auditor that runs alongside the simulation.
    struct AuditReport
    {
        std::uint64_t events_checked = 0;
        std::uint64_t decisions_checked = 0;
        std::uint64_t shrink_decisions = 0;
        std::uint64_t wide_expand_decisions = 0;
        std::vector<std::string> violations;

        bool ok() const noexcept { return violations.empty(); }
    };

    struct RunResult
    {
        metrics::RunSummary summary;
        AuditReport audit;
        std::string trace;
        std::uint64_t events_scheduled = 0;
        std::uint64_t events_processed = 0;
        std::uint64_t events_cancelled = 0;
    };

    /// One deterministic run of a workload on a cluster.
    class Simulation
    {
    public:
        Simulation(SimConfig config, std::vector<workload::JobDescriptor> jobs, std::string label = "run");

        /// Processes events until the queue drains or `until` is reached.
        RunResult run(std::optional<SimTime> until = std::nullopt);

    private:
        enum class Phase : std::uint8_t
        {
            Waiting,
            Running,
            Checking,
            Resizing,
            AwaitingResizer,
            Done,
        };

        struct InFlight
        {
            ActionKind kind = ActionKind::None;
            int from = 0;
            int target = 0;
        };

        struct JobRun
        {
            workload::JobDescriptor desc;
            appmodel::AppModel app;
            Phase phase = Phase::Waiting;
            int alloc = 0;
            std::uint32_t steps_done = 0;
            dmr::JobCheckState check;
            std::optional<std::size_t> pending_record;
            std::optional<std::size_t> active_record;
            InFlight in_flight;
        };

        JobRun &job(JobId id);
        std::optional<SimTime> period_for(const JobRun &run) const;

        void on_arrival(JobId id);
        void on_step_complete(JobId id);
        void on_checkpoint(JobId id);
        void on_resize_complete(JobId id);
        void on_resizer_timeout(JobId id);

        void try_schedule();
        void start_job(JobId id);
        void begin_step(JobId id, SimTime at);
        void finish_job(JobId id);
        void apply_action(JobId id, const Action &action, SimTime resume_at, std::size_t record);
        void start_resize(JobId id, ActionKind kind, int from, int target, SimTime at);
        void close_record(JobId id, metrics::Outcome outcome);

        std::size_t record_decision(JobId id, const Action &action, int from, SimTime overhead, bool deferred);
        void audit_decision(const rms::ClusterState &before, JobId id, const Action &action);
        void audit_state();
        void record_timeline();

        std::ostream &trace_line();

        SimConfig m_config;
        std::string m_label;
        rms::ResourceManager m_rms;
        EventQueue m_queue;
        std::vector<JobRun> m_jobs;
        std::map<JobId, std::size_t> m_index;
        metrics::RunSummary m_summary;
        AuditReport m_audit;
        std::ostringstream m_trace;
        std::size_t m_completed = 0;
    };

    /// Human-readable decision log, one line per forwarded check.
    std::string format_decision_log(const std::vector<metrics::ActionRecord> &actions);
} // namespace dmrsim::simcore
