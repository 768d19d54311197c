#include "dmrsim/event_queue.hpp"

#include "dmrsim/error.hpp"

namespace dmrsim::simcore
{
    std::string_view to_string(EventKind kind) noexcept
    {
        switch (kind)
        {
        case EventKind::StepComplete:
            return "StepComplete";
        case EventKind::JobArrival:
            return "JobArrival";
        case EventKind::CheckPoint:
            return "CheckPoint";
        case EventKind::ResizeComplete:
            return "ResizeComplete";
        case EventKind::ResizerTimeout:
            return "ResizerTimeout";
        case EventKind::SimulationEnd:
            return "SimulationEnd";
        }
        return "?";
    }

    void Clock::advance_to(SimTime t)
    {
        if (t < m_now)
        {
            throw Error(ErrorCode::Causality, "clock cannot move backwards from " + m_now.to_string() + " to " + t.to_string());
        }
        m_now = t;
    }

    std::uint64_t EventQueue::generation_of(std::optional<JobId> subject, EventKind kind) const
    {
        if (!subject)
        {
            return 0;
        }
        const auto it = m_generations.find({*subject, kind});
        return it == m_generations.end() ? 0 : it->second;
    }

    std::uint64_t EventQueue::schedule(SimTime time, EventKind kind, std::optional<JobId> subject)
    {
        if (time < m_clock.now())
        {
            throw Error(ErrorCode::Causality, "event " + std::string(to_string(kind)) + " at " + time.to_string() +
                                                  " precedes clock " + m_clock.now().to_string());
        }
        Event ev;
        ev.time = time;
        ev.kind = kind;
        ev.subject = subject;
        ev.seq = m_next_seq++;
        ev.generation = generation_of(subject, kind);
        m_heap.push(ev);
        return ev.seq;
    }

    void EventQueue::cancel(JobId subject, EventKind kind)
    {
        ++m_generations[{subject, kind}];
    }

    std::optional<Event> EventQueue::next()
    {
        while (!m_heap.empty())
        {
            Event ev = m_heap.top();
            m_heap.pop();
            if (ev.generation != generation_of(ev.subject, ev.kind))
            {
                ++m_cancelled;
                continue;
            }
            m_clock.advance_to(ev.time);
            ++m_processed;
            return ev;
        }
        return std::nullopt;
    }
} // namespace dmrsim::simcore
