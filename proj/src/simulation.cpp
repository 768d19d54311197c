#include "dmrsim/simulation.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <cstdio>

namespace dmrsim::simcore
{
    std::string_view to_string(SchedulingMode mode) noexcept
    {
        return mode == SchedulingMode::Sync ? "sync" : "async";
    }

    namespace
    {
        constexpr std::size_t max_violations = 64;

        bool reachable(int from, int to, int factor)
        {
            if (from == to)
            {
                return true;
            }
            if (factor < 2)
            {
                return false;
            }
            int lo = std::min(from, to);
            const int hi = std::max(from, to);
            while (lo < hi)
            {
                lo *= factor;
            }
            return lo == hi;
        }
    } // namespace

    Simulation::Simulation(SimConfig config, std::vector<workload::JobDescriptor> jobs, std::string label)
        : m_config(std::move(config)), m_label(std::move(label)),
          m_rms(m_config.nodes, m_config.policy.backfill)
    {
        if (m_config.nodes < 1)
        {
            throw invalid_argument("cluster needs at least one node");
        }
        if (m_config.policy.expand_timeout <= SimTime::zero())
        {
            throw invalid_argument("expand_timeout must be positive");
        }
        m_config.cost.validate();
        for (const AppKind kind : {AppKind::FS, AppKind::CG, AppKind::Jacobi, AppKind::Nbody})
        {
            m_config.apps.at(kind).validate();
        }

        m_summary.label = m_label;
        m_summary.total_nodes = m_config.nodes;
        m_summary.workload_fingerprint = workload::fingerprint(jobs);
        m_jobs.reserve(jobs.size());
        for (workload::JobDescriptor &d : jobs)
        {
            d.validate();
            if (m_index.count(d.id))
            {
                throw invalid_argument("duplicate job id " + std::to_string(d.id));
            }
            JobRun run;
            run.app = m_config.apps.at(d.app);
            run.app.min_procs = d.min_procs;
            run.app.max_procs = d.max_procs;
            run.check.job = d.id;
            run.check.flexible = d.flexible;
            run.desc = std::move(d);
            m_index[run.desc.id] = m_jobs.size();

            metrics::JobTiming timing;
            timing.id = run.desc.id;
            timing.app = run.desc.app;
            timing.flexible = run.desc.flexible;
            timing.arrival = run.desc.arrival;
            m_summary.jobs.push_back(timing);
            m_jobs.push_back(std::move(run));
        }
    }

    Simulation::JobRun &Simulation::job(JobId id)
    {
        const auto it = m_index.find(id);
        if (it == m_index.end())
        {
            throw contract_error("unknown job " + std::to_string(id));
        }
        return m_jobs[it->second];
    }

    std::optional<SimTime> Simulation::period_for(const JobRun &run) const
    {
        if (m_config.policy.inhibitor_period)
        {
            return *m_config.policy.inhibitor_period;
        }
        return run.app.check_period;
    }

    std::ostream &Simulation::trace_line()
    {
        m_trace << m_queue.now().to_string() << ' ';
        return m_trace;
    }

    RunResult Simulation::run(std::optional<SimTime> until)
    {
        for (const JobRun &r : m_jobs)
        {
            m_queue.schedule(r.desc.arrival, EventKind::JobArrival, r.desc.id);
        }
        if (until)
        {
            m_queue.schedule(*until, EventKind::SimulationEnd);
        }

        while (std::optional<Event> ev = m_queue.next())
        {
            if (m_config.trace)
            {
                trace_line() << to_string(ev->kind);
                if (ev->subject)
                {
                    m_trace << " job=" << *ev->subject;
                }
                m_trace << '\n';
            }
            if (ev->kind == EventKind::SimulationEnd)
            {
                break;
            }
            const JobId id = ev->subject.value();
            switch (ev->kind)
            {
            case EventKind::JobArrival:
                on_arrival(id);
                break;
            case EventKind::StepComplete:
                on_step_complete(id);
                break;
            case EventKind::CheckPoint:
                on_checkpoint(id);
                break;
            case EventKind::ResizeComplete:
                on_resize_complete(id);
                break;
            case EventKind::ResizerTimeout:
                on_resizer_timeout(id);
                break;
            case EventKind::SimulationEnd:
                break;
            }
            audit_state();
            record_timeline();
        }

        for (const JobId id : m_rms.unschedulable())
        {
            m_summary.jobs[m_index.at(id)].unschedulable = true;
        }
        metrics::finalize(m_summary);

        RunResult result;
        result.summary = std::move(m_summary);
        result.audit = std::move(m_audit);
        result.trace = m_trace.str();
        result.events_scheduled = m_queue.scheduled_count();
        result.events_processed = m_queue.processed_count();
        result.events_cancelled = m_queue.cancelled_count();
        return result;
    }

    void Simulation::on_arrival(JobId id)
    {
        m_rms.submit(job(id).desc);
        if (m_config.trace && !m_rms.unschedulable().empty() && m_rms.unschedulable().back() == id)
        {
            trace_line() << "unschedulable job=" << id << " size=" << job(id).desc.initial_size << '\n';
        }
        try_schedule();
    }

    void Simulation::try_schedule()
    {
        for (const rms::ResourceManager::Start &s : m_rms.schedule_queue(m_queue.now()))
        {
            if (!s.resizer)
            {
                start_job(s.job);
                continue;
            }
            JobRun &r = job(s.job);
            m_queue.cancel(s.job, EventKind::ResizerTimeout);
            if (m_config.trace)
            {
                trace_line() << "resizer-granted job=" << s.job << " nodes=" << s.nodes << '\n';
            }
            start_resize(s.job, ActionKind::Expand, r.alloc, s.nodes, m_queue.now());
        }
    }

    void Simulation::start_job(JobId id)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();
        r.alloc = r.desc.initial_size;
        r.check.gate = dmr::CheckGate(period_for(r), now);
        m_summary.jobs[m_index.at(id)].start = now;
        if (m_config.trace)
        {
            trace_line() << "start job=" << id << " nodes=" << r.alloc << '\n';
        }
        begin_step(id, now);
    }

    void Simulation::begin_step(JobId id, SimTime at)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();
        const SimTime step = appmodel::step_time(r.app, r.desc.base_step_time, r.desc.initial_size, r.alloc);
        const auto remaining = static_cast<std::int64_t>(r.desc.iterations) - r.steps_done;
        m_rms.set_estimated_end(id, at + step * remaining);
        m_queue.schedule(at + step, EventKind::StepComplete, id);
        r.phase = Phase::Running;
        r.check.step = r.steps_done;

        if (m_config.policy.mode != SchedulingMode::Async || !r.desc.flexible || remaining <= 1)
        {
            return;
        }
        const rms::ClusterState before = m_rms.snapshot();
        const std::optional<dmr::CheckOutcome> outcome =
            dmr::icheck_status(r.check, r.desc.request(), now, m_rms, m_config.cost, m_config.policy.toggles);
        if (!outcome)
        {
            ++m_summary.inhibited_checks;
            return;
        }
        ++m_summary.forwarded_checks;
        audit_decision(before, id, outcome->action);
        r.pending_record = record_decision(id, outcome->action, r.alloc, outcome->overhead, true);
    }

    void Simulation::on_step_complete(JobId id)
    {
        JobRun &r = job(id);
        ++r.steps_done;
        if (r.steps_done >= static_cast<std::uint32_t>(r.desc.iterations))
        {
            finish_job(id);
            return;
        }
        if (r.desc.flexible)
        {
            r.phase = Phase::Checking;
            m_queue.schedule(m_queue.now(), EventKind::CheckPoint, id);
            return;
        }
        begin_step(id, m_queue.now());
    }

    void Simulation::on_checkpoint(JobId id)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();

        if (m_config.policy.mode == SchedulingMode::Sync)
        {
            const rms::ClusterState before = m_rms.snapshot();
            const dmr::CheckOutcome outcome =
                dmr::check_status(r.check, r.desc.request(), now, m_rms, m_config.cost, m_config.policy.toggles);
            if (!outcome.forwarded)
            {
                ++m_summary.inhibited_checks;
                begin_step(id, now);
                return;
            }
            ++m_summary.forwarded_checks;
            audit_decision(before, id, outcome.action);
            const std::size_t rec = record_decision(id, outcome.action, r.alloc, outcome.overhead, false);
            m_summary.actions[rec].applied_at = now;
            apply_action(id, outcome.action, now + outcome.overhead, rec);
            return;
        }

        const std::optional<dmr::PendingAction> pending = dmr::take_pending(r.check);
        if (!pending)
        {
            begin_step(id, now);
            return;
        }
        const std::size_t rec = r.pending_record.value();
        r.pending_record.reset();
        m_summary.actions[rec].applied_at = now;
        apply_action(id, pending->action, now, rec);
    }

    void Simulation::apply_action(JobId id, const Action &action, SimTime resume_at, std::size_t record)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();
        r.active_record = record;
        if (m_config.trace)
        {
            trace_line() << "apply job=" << id << " kind=" << to_string(action.kind) << " nodes=" << r.alloc;
            if (action.kind != ActionKind::None)
            {
                m_trace << " target=" << action.target;
            }
            m_trace << '\n';
        }

        switch (action.kind)
        {
        case ActionKind::None: {
            metrics::ActionRecord &rec = m_summary.actions[record];
            rec.duration = resume_at - (rec.deferred ? now : rec.time);
            close_record(id, metrics::Outcome::Applied);
            begin_step(id, resume_at);
            return;
        }
        case ActionKind::Expand: {
            const rms::ResizerJob rj =
                m_rms.begin_expand(id, action.target, now, m_config.policy.expand_timeout);
            if (rj.state == rms::ResizerJob::State::Granted)
            {
                start_resize(id, ActionKind::Expand, r.alloc, action.target, resume_at);
                return;
            }
            r.phase = Phase::AwaitingResizer;
            m_queue.schedule(rj.deadline, EventKind::ResizerTimeout, id);
            if (m_config.trace)
            {
                trace_line() << "resizer-queued job=" << id << " extra=" << rj.extra_nodes
                             << " deadline=" << rj.deadline.to_string() << '\n';
            }
            return;
        }
        case ActionKind::Shrink:
            m_rms.begin_shrink(id, action.target);
            start_resize(id, ActionKind::Shrink, r.alloc, action.target, resume_at);
            return;
        }
    }

    void Simulation::start_resize(JobId id, ActionKind kind, int from, int target, SimTime at)
    {
        JobRun &r = job(id);
        r.phase = Phase::Resizing;
        r.in_flight = InFlight{kind, from, target};
        if (kind == ActionKind::Expand)
        {
            r.alloc = target;
        }
        ++m_summary.jobs[m_index.at(id)].resizes;
        const SimTime cost = appmodel::resize_cost(r.desc.data_volume, from, target, m_config.cost);
        m_queue.schedule(at + cost, EventKind::ResizeComplete, id);
        if (m_config.trace && m_config.trace_plans)
        {
            m_trace << dmr::plan_resize(from, target, r.desc.data_volume).to_string();
        }
    }

    void Simulation::close_record(JobId id, metrics::Outcome outcome)
    {
        JobRun &r = job(id);
        if (!r.active_record)
        {
            return;
        }
        m_summary.actions[*r.active_record].outcome = outcome;
        r.active_record.reset();
    }

    void Simulation::on_resize_complete(JobId id)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();
        const InFlight done = r.in_flight;
        r.in_flight = InFlight{};
        if (done.kind == ActionKind::Shrink)
        {
            m_rms.complete_shrink(id, done.target);
            r.alloc = done.target;
        }
        if (r.active_record)
        {
            metrics::ActionRecord &rec = m_summary.actions[*r.active_record];
            rec.duration = now - (rec.deferred ? rec.applied_at.value_or(rec.time) : rec.time);
        }
        close_record(id, metrics::Outcome::Applied);
        if (m_config.trace)
        {
            trace_line() << "resized job=" << id << " nodes=" << r.alloc << '\n';
        }
        // Waiting jobs get the released nodes before the resized job decides again.
        if (done.kind == ActionKind::Shrink)
        {
            try_schedule();
        }
        begin_step(id, now);
    }

    void Simulation::on_resizer_timeout(JobId id)
    {
        JobRun &r = job(id);
        const SimTime now = m_queue.now();
        if (r.phase != Phase::AwaitingResizer)
        {
            return;
        }
        m_rms.cancel_resizer(id);
        if (r.active_record)
        {
            metrics::ActionRecord &rec = m_summary.actions[*r.active_record];
            rec.duration = now - (rec.deferred ? rec.applied_at.value_or(rec.time) : rec.time);
        }
        close_record(id, metrics::Outcome::TimedOut);
        if (m_config.trace)
        {
            trace_line() << "resizer-timeout job=" << id << '\n';
        }
        begin_step(id, now);
    }

    void Simulation::finish_job(JobId id)
    {
        JobRun &r = job(id);
        r.phase = Phase::Done;
        m_summary.jobs[m_index.at(id)].finish = m_queue.now();
        if (dmr::take_pending(r.check) && r.pending_record)
        {
            m_summary.actions[*r.pending_record].outcome = metrics::Outcome::Discarded;
        }
        r.pending_record.reset();
        m_rms.finish(id);
        ++m_completed;
        if (m_config.trace)
        {
            trace_line() << "finish job=" << id << '\n';
        }
        try_schedule();
    }

    std::size_t Simulation::record_decision(JobId id, const Action &action, int from, SimTime overhead, bool deferred)
    {
        metrics::ActionRecord rec;
        rec.time = m_queue.now();
        rec.job = id;
        rec.kind = action.kind;
        rec.from = from;
        rec.target = action.kind == ActionKind::None ? from : action.target;
        rec.reason = action.reason;
        rec.boosted = action.boosted;
        rec.deferred = deferred;
        rec.overhead = overhead;
        m_summary.actions.push_back(rec);
        if (m_config.trace)
        {
            trace_line() << "decide job=" << id << " mode=" << to_string(m_config.policy.mode)
                         << " kind=" << to_string(action.kind) << " from=" << from << " target=" << rec.target
                         << " reason=" << to_string(action.reason);
            if (action.boosted)
            {
                m_trace << " boost=" << *action.boosted;
            }
            m_trace << '\n';
        }
        return m_summary.actions.size() - 1;
    }

    void Simulation::audit_decision(const rms::ClusterState &before, JobId id, const Action &action)
    {
        ++m_audit.decisions_checked;
        const JobRun &r = job(id);
        const int current = before.allocations.at(id);
        const int avail = before.free_nodes + before.releasing_nodes;
        auto fail = [&](const std::string &what) {
            if (m_audit.violations.size() < max_violations)
            {
                m_audit.violations.push_back(m_queue.now().to_string() + " job " + std::to_string(id) + ": " + what);
            }
        };

        if (action.kind == ActionKind::None)
        {
            return;
        }
        if (action.target < r.desc.min_procs || action.target > r.desc.max_procs)
        {
            fail("target outside [min, max]");
        }
        if (!reachable(current, action.target, r.desc.factor))
        {
            fail("target not reachable by the job's factor");
        }

        if (action.kind == ActionKind::Expand)
        {
            if (action.target <= current)
            {
                fail("expansion does not grow the job");
            }
            if (action.reason == Reason::WideOptExpand)
            {
                ++m_audit.wide_expand_decisions;
                if (action.target - current > before.free_nodes)
                {
                    fail("wide expansion beyond the free nodes");
                }
                const bool someone_fits = std::any_of(before.queue.begin(), before.queue.end(),
                                                      [&](const rms::QueuedJob &q) { return q.size <= avail; });
                if (someone_fits)
                {
                    fail("wide expansion while a queued job could start");
                }
            }
            return;
        }

        ++m_audit.shrink_decisions;
        if (action.target >= current)
        {
            fail("shrink does not reduce the job");
        }
        if (before.queue.empty())
        {
            fail("shrink with an empty queue");
        }
        if (!action.boosted)
        {
            fail("shrink without a boosted job");
            return;
        }
        const auto q = std::find_if(before.queue.begin(), before.queue.end(),
                                    [&](const rms::QueuedJob &j) { return j.id == *action.boosted; });
        if (q == before.queue.end())
        {
            fail("boosted job was not queued");
            return;
        }
        if (q->size <= avail || q->size > avail + (current - action.target))
        {
            fail("shrink does not enable the boosted job");
        }
        if (!m_rms.is_boosted(*action.boosted))
        {
            fail("enabled job was not boosted");
        }
    }

    void Simulation::audit_state()
    {
        ++m_audit.events_checked;
        auto fail = [&](const std::string &what) {
            if (m_audit.violations.size() < max_violations)
            {
                m_audit.violations.push_back(m_queue.now().to_string() + ": " + what);
            }
        };
        if (!m_rms.conserved())
        {
            fail("node conservation broken");
        }
        if (m_rms.allocated_nodes() > m_config.nodes)
        {
            fail("more nodes allocated than exist");
        }
        for (const JobRun &r : m_jobs)
        {
            if (!m_rms.is_running(r.desc.id))
            {
                continue;
            }
            const int alloc = m_rms.allocation(r.desc.id);
            if (alloc < std::min(r.desc.min_procs, r.desc.initial_size) || alloc > r.desc.max_procs)
            {
                fail("job " + std::to_string(r.desc.id) + " allocation outside its bounds");
            }
            if (!reachable(r.desc.initial_size, alloc, r.desc.factor))
            {
                fail("job " + std::to_string(r.desc.id) + " allocation not reachable from its initial size");
            }
        }
    }

    void Simulation::record_timeline()
    {
        metrics::TimelinePoint p;
        p.time = m_queue.now();
        p.allocated = m_rms.allocated_nodes();
        p.running = static_cast<int>(m_rms.running_count());
        p.completed = static_cast<int>(m_completed);
        std::vector<metrics::TimelinePoint> &tl = m_summary.timeline;
        if (!tl.empty() && tl.back().time == p.time)
        {
            tl.back() = p;
            if (tl.size() >= 2)
            {
                const metrics::TimelinePoint &prev = tl[tl.size() - 2];
                if (prev.allocated == p.allocated && prev.running == p.running && prev.completed == p.completed)
                {
                    tl.pop_back();
                }
            }
            return;
        }
        if (!tl.empty() && tl.back().allocated == p.allocated && tl.back().running == p.running &&
            tl.back().completed == p.completed)
        {
            return;
        }
        tl.push_back(p);
    }

    std::string format_decision_log(const std::vector<metrics::ActionRecord> &actions)
    {
        std::string out;
        for (const metrics::ActionRecord &a : actions)
        {
            char buf[256];
            std::snprintf(buf, sizeof buf, "%s job=%u %s %d->%d %s %s", a.time.to_string().c_str(), a.job,
                          std::string(to_string(a.kind)).c_str(), a.from, a.target,
                          std::string(to_string(a.reason)).c_str(), std::string(to_string(a.outcome)).c_str());
            out += buf;
            if (a.applied_at && a.deferred)
            {
                out += " applied=" + a.applied_at->to_string();
            }
            out += '\n';
        }
        return out;
    }
} // namespace dmrsim::simcore
