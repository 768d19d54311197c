#pragma once

#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <string_view>
#include <utility>
#include <vector>

namespace dmrsim::simcore
{
    /// Declaration order is the tie-break priority at equal timestamps: step
    /// completions free resources before arrivals and checks observe the cluster.
    enum class EventKind : std::uint8_t
    {
        StepComplete = 0,
        JobArrival = 1,
        CheckPoint = 2,
        ResizeComplete = 3,
        ResizerTimeout = 4,
        SimulationEnd = 5,
    };

    std::string_view to_string(EventKind kind) noexcept;

    struct Event
    {
        SimTime time;
        EventKind kind = EventKind::SimulationEnd;
        std::optional<JobId> subject;
        std::uint64_t seq = 0;
        std::uint64_t generation = 0;
    };

    class Clock
    {
    public:
        SimTime now() const noexcept { return m_now; }

        /// Monotone: throws on an attempt to move backwards.
        void advance_to(SimTime t);

    private:
        SimTime m_now = SimTime::zero();
    };

    /// Priority queue over (time, kind, seq) with per-(subject, kind) tombstoning.
    ///
    /// cancel() bumps a generation counter; queued events stamped with an older
    /// generation are dropped when they surface, so every scheduled event is
    /// either returned by next() exactly once or counted as cancelled.
    class EventQueue
    {
    public:
        /// Returns the assigned seq. Throws ErrorCode::Causality when `time` is
        /// earlier than the clock.
        std::uint64_t schedule(SimTime time, EventKind kind, std::optional<JobId> subject = std::nullopt);

        void cancel(JobId subject, EventKind kind);

        /// Pops the next live event and advances the clock to its time.
        std::optional<Event> next();

        bool empty() const noexcept { return m_heap.empty(); }
        SimTime now() const noexcept { return m_clock.now(); }

        std::uint64_t scheduled_count() const noexcept { return m_next_seq; }
        std::uint64_t processed_count() const noexcept { return m_processed; }
        std::uint64_t cancelled_count() const noexcept { return m_cancelled; }

    private:
        struct Later
        {
            bool operator()(const Event &a, const Event &b) const noexcept
            {
                if (a.time != b.time)
                {
                    return a.time > b.time;
                }
                if (a.kind != b.kind)
                {
                    return a.kind > b.kind;
                }
                return a.seq > b.seq;
            }
        };

        std::uint64_t generation_of(std::optional<JobId> subject, EventKind kind) const;

        Clock m_clock;
        std::priority_queue<Event, std::vector<Event>, Later> m_heap;
        std::map<std::pair<JobId, EventKind>, std::uint64_t> m_generations;
        std::uint64_t m_next_seq = 0;
        std::uint64_t m_processed = 0;
        std::uint64_t m_cancelled = 0;
    };
} // namespace dmrsim::simcore
