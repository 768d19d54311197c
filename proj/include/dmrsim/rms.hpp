#pragma once

#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"
#include "dmrsim/workload.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <vector>

namespace dmrsim::rms
{
    /// Which policy modes decide_action may use, in precedence order.
    struct PolicyToggles
    {
        bool requested_action = true;
        bool preferred = true;
        bool wide_optimization = true;
    };

    struct QueuedJob
    {
        JobId id = 0;
        int size = 0;
    };

    /// Read-only view of the cluster handed to the reconfiguration policy.
    struct ClusterState
    {
        int total_nodes = 0;
        int free_nodes = 0;
        int releasing_nodes = 0;          // still allocated, freed when in-flight shrinks finish
        std::map<JobId, int> allocations; // running jobs
        std::vector<QueuedJob> queue;     // schedulable waiting jobs, highest priority first
    };

    /// Sizes reachable from `current` by multiplying or dividing by powers of
    /// `factor`, restricted to [min_procs, max_procs]. Ascending.
    std::vector<int> reachable_sizes(int current, int factor, int min_procs, int max_procs);

    /// The three-mode reconfiguration policy.
    ///
    /// Mode precedence:
    ///  1. requested action: request.min above the allocation is an expand demand
    ///     to the smallest reachable size >= request.min, granted only if the free
    ///     nodes cover it;
    ///  2. preferred size: equal -> none; below -> expand toward it (up to max if
    ///     the queue is empty); above -> shrink toward it when that lets a waiting job start;
    ///  3. wide optimisation: shrink to the largest reachable size that lets the
    ///     highest-priority waiting job start (and boost that job), otherwise
    ///     expand to the largest reachable size fitting the free nodes when the
    ///     queue is empty or nothing in it fits.
    ///
    /// Throws ErrorCode::InvalidArgument for an inconsistent request and
    /// ErrorCode::Contract when `job` is not running.
    Action decide_action(const ClusterState &state, JobId job, const DmrRequest &request,
                         const PolicyToggles &toggles = {});

    struct ResizerJob
    {
        enum class State
        {
            Pending,
            Granted,
            Cancelled,
        };

        JobId parent = 0;
        int extra_nodes = 0;
        int target = 0;
        SimTime submitted;
        SimTime deadline;
        State state = State::Pending;
    };

    /// Queue, allocations and start scheduling (FCFS by priority with optional
    /// EASY backfill). One node runs one process.
    class ResourceManager
    {
    public:
        explicit ResourceManager(int total_nodes, bool backfill = true);

        /// Queues the job at base priority. Throws on a duplicate id. Jobs larger
        /// than the cluster are recorded as unschedulable and never start.
        void submit(const workload::JobDescriptor &job);

        struct Start
        {
            JobId job = 0;
            int nodes = 0;        // allocation after the start or grant
            bool resizer = false; // true when a pending expansion was granted
        };

        /// Starts whatever the priority order and the backfill reservation allow.
        std::vector<Start> schedule_queue(SimTime now);

        /// decide_action on the current state; a shrink also boosts the job it enables.
        Action decide(JobId job, const DmrRequest &request, const PolicyToggles &toggles = {});

        /// Submits a resizer job for target - allocation extra nodes at maximum
        /// priority. Granted immediately when the nodes are free.
        ResizerJob begin_expand(JobId job, int target, SimTime now, SimTime timeout);
        void cancel_resizer(JobId job);
        std::optional<ResizerJob> resizer(JobId job) const;

        /// Marks the nodes above `target` as releasing; they stay allocated
        /// until complete_shrink (the ACK barrier).
        void begin_shrink(JobId job, int target);
        void complete_shrink(JobId job, int target);

        /// Releases every node of a finished job and drops any pending resizer.
        void finish(JobId job);

        void set_estimated_end(JobId job, SimTime end);
        void boost(JobId job);

        ClusterState snapshot() const;

        int total_nodes() const noexcept { return m_total; }
        int free_nodes() const noexcept { return m_free; }
        int releasing_nodes() const noexcept { return m_releasing; }
        int allocated_nodes() const noexcept;
        int allocation(JobId job) const;
        std::size_t running_count() const noexcept { return m_running.size(); }
        bool is_running(JobId job) const { return m_running.count(job) != 0; }
        bool is_queued(JobId job) const;
        bool is_boosted(JobId job) const;
        const std::vector<JobId> &unschedulable() const noexcept { return m_unschedulable; }

        /// free + allocated == total.
        bool conserved() const noexcept;

    private:
        struct Running
        {
            int alloc = 0;
            SimTime est_end;
            std::optional<int> shrinking_to;
        };

        enum Tier : int
        {
            TierResizer = 0,
            TierBoosted = 1,
            TierNormal = 2,
        };

        struct Entry
        {
            JobId id = 0;
            int size = 0;
            SimTime est_runtime;
            int tier = TierNormal;
            std::uint64_t order = 0;
            bool resizer = false;
        };

        Running &running(JobId job, const char *what);
        void sort_queue();
        Start grant(const Entry &e, SimTime now);

        int m_total;
        int m_free;
        int m_releasing = 0;
        bool m_backfill;
        std::map<JobId, Running> m_running;
        std::vector<Entry> m_queue;
        std::map<JobId, ResizerJob> m_resizers;
        std::set<JobId> m_known;
        std::vector<JobId> m_unschedulable;
        std::uint64_t m_submit_seq = 0;
        std::uint64_t m_boost_seq = 0;
    };
} // namespace dmrsim::rms
