#pragma once

#include "dmrsim/appmodel.hpp"
#include "dmrsim/rms.hpp"
#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dmrsim::dmr
{
    /// Checking inhibitor: forwards at most one check per period. The window
    /// opens at `start` (job start), so the first forwarded check comes one
    /// period after the job begins.
    class CheckGate
    {
    public:
        explicit CheckGate(std::optional<SimTime> period = std::nullopt, SimTime start = SimTime::zero())
            : m_period(period), m_last_forwarded(start)
        {
        }

        /// True iff no period is set or now - last_forwarded >= period; a true
        /// result records `now` as the last forwarded check.
        bool pass(SimTime now);

        std::optional<SimTime> period() const noexcept { return m_period; }
        SimTime last_forwarded() const noexcept { return m_last_forwarded; }

    private:
        std::optional<SimTime> m_period;
        SimTime m_last_forwarded;
    };

    /// Free-function form of CheckGate::pass.
    bool inhibitor_gate(CheckGate &gate, SimTime now);

    struct PendingAction
    {
        Action action;
        std::uint32_t decided_at_step = 0;
        SimTime decided_at;
    };

    /// Per-job runtime state the DMR layer needs at a reconfiguring point.
    struct JobCheckState
    {
        JobId job = 0;
        bool flexible = false;
        std::uint32_t step = 0; // index of the step that is about to run
        CheckGate gate;
        std::optional<PendingAction> pending;
    };

    struct CheckOutcome
    {
        bool forwarded = false;
        Action action;
        SimTime overhead; // scheduling time charged to the job
    };

    /// Synchronous check. If the gate passes, asks the resource manager for an
    /// action and charges scheduling_overhead for the nodes involved; otherwise
    /// returns None without contacting it.
    CheckOutcome check_status(JobCheckState &state, const DmrRequest &request, SimTime now,
                              rms::ResourceManager &manager, const appmodel::CostModelParams &cost,
                              const rms::PolicyToggles &toggles = {});

    /// Asynchronous check. Decides against the current cluster state and stores
    /// the result as the job's pending action, to be applied verbatim at the
    /// next reconfiguring point. Ignored while a pending action is unconsumed.
    /// Returns the outcome when the resource manager was contacted.
    std::optional<CheckOutcome> icheck_status(JobCheckState &state, const DmrRequest &request, SimTime now,
                                              rms::ResourceManager &manager, const appmodel::CostModelParams &cost,
                                              const rms::PolicyToggles &toggles = {});

    /// Removes and returns the pending action, if any.
    std::optional<PendingAction> take_pending(JobCheckState &state);

    /// Nodes whose processes take part in deciding `action` from `current`.
    int nodes_involved(const Action &action, int current);

    enum class Direction : std::uint8_t
    {
        Identity,
        Expand,
        Shrink,
    };

    std::string_view to_string(Direction d) noexcept;

    struct ByteRange
    {
        std::uint64_t offset = 0;
        std::uint64_t length = 0;

        bool operator==(const ByteRange &) const = default;
    };

    /// One data movement. For expansions `dst_rank` is a rank of the new
    /// process set; for shrinks it is the receiving rank of the old set, which
    /// later hands its gathered data to new rank dst_rank / factor.
    struct Transfer
    {
        int src_old_rank = 0;
        int dst_rank = 0;
        std::uint64_t bytes = 0;
        ByteRange range;

        bool operator==(const Transfer &) const = default;
    };

    struct RedistributionPlan
    {
        int old_world = 0;
        int new_world = 0;
        int factor = 1;
        Direction direction = Direction::Identity;
        std::vector<Transfer> transfers;
        std::vector<std::vector<int>> rank_map;        // new rank -> originating old ranks
        std::vector<std::vector<ByteRange>> ownership; // new rank -> data ranges, in order

        /// Stable text form used in traces and golden tests.
        std::string to_string() const;
    };

    /// Byte range held by `rank` when `volume` is block-partitioned over `world` ranks.
    ByteRange block_range(std::uint64_t volume, int world, int rank);

    /// Old rank r splits its block into `factor` parts and sends part i to new
    /// rank r * factor + i. Part i is exactly that rank's block in the new world.
    RedistributionPlan plan_expand(int old_world, int factor, std::uint64_t volume);

    /// Ranks with r % factor == factor - 1 receive; every other rank r sends its
    /// block to factor * (r / factor + 1) - 1. Receiver r becomes new rank
    /// r / factor. Throws ErrorCode::Domain when old_world % factor != 0.
    RedistributionPlan plan_shrink(int old_world, int factor, std::uint64_t volume);

    /// Single plan between any two sizes related by an integer factor.
    RedistributionPlan plan_resize(int old_world, int new_world, std::uint64_t volume);
} // namespace dmrsim::dmr
