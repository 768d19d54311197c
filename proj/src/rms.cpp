#include "dmrsim/rms.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <string>

namespace dmrsim::rms
{
    std::vector<int> reachable_sizes(int current, int factor, int min_procs, int max_procs)
    {
        if (current < 1 || factor < 2)
        {
            throw invalid_argument("reachable_sizes needs current >= 1 and factor >= 2");
        }
        std::vector<int> sizes;
        for (int s = current; s >= 1; s /= factor)
        {
            if (s >= min_procs && s <= max_procs)
            {
                sizes.push_back(s);
            }
            if (s % factor != 0)
            {
                break;
            }
        }
        for (long long s = static_cast<long long>(current) * factor; s <= max_procs; s *= factor)
        {
            if (s >= min_procs)
            {
                sizes.push_back(static_cast<int>(s));
            }
        }
        std::sort(sizes.begin(), sizes.end());
        return sizes;
    }

    namespace
    {
        // Largest reachable size above `current`, at most `cap`, whose extra nodes fit in `free_nodes`.
        std::optional<int> largest_expansion(const std::vector<int> &sizes, int current, int cap, int free_nodes)
        {
            std::optional<int> best;
            for (const int s : sizes)
            {
                if (s > current && s <= cap && s - current <= free_nodes)
                {
                    best = s;
                }
            }
            return best;
        }

        // Highest-priority waiting job that does not fit now but would once `freed` more nodes are released.
        std::optional<JobId> enabled_job(const ClusterState &state, int freed)
        {
            const int avail = state.free_nodes + state.releasing_nodes;
            for (const QueuedJob &q : state.queue)
            {
                if (q.size > avail && q.size <= avail + freed)
                {
                    return q.id;
                }
            }
            return std::nullopt;
        }
    } // namespace

    Action decide_action(const ClusterState &state, JobId job, const DmrRequest &request, const PolicyToggles &toggles)
    {
        request.validate();
        const auto it = state.allocations.find(job);
        if (it == state.allocations.end())
        {
            throw contract_error("decide_action: job " + std::to_string(job) + " is not running");
        }
        const int current = it->second;
        const int free_nodes = state.free_nodes;
        const int avail = state.free_nodes + state.releasing_nodes;
        const bool queue_empty = state.queue.empty();
        const std::vector<int> sizes = reachable_sizes(current, request.factor, request.min_procs, request.max_procs);

        if (toggles.requested_action && request.min_procs > current)
        {
            // sizes are all >= request.min here, so the first one is the demand.
            if (!sizes.empty() && sizes.front() > current && sizes.front() - current <= free_nodes)
            {
                return Action::expand(sizes.front(), Reason::RequestedAction);
            }
            return Action::none(Reason::RequestedAction);
        }

        if (toggles.preferred && request.preferred)
        {
            const int preferred = *request.preferred;
            if (preferred == current)
            {
                return Action::none(Reason::PreferredMatch);
            }
            if (preferred > current)
            {
                const int cap = queue_empty ? request.max_procs : preferred;
                if (const auto target = largest_expansion(sizes, current, cap, free_nodes))
                {
                    return Action::expand(*target, Reason::PreferredMatch);
                }
            }
            else if (!queue_empty)
            {
                // Smallest reachable size not below the preference.
                for (const int s : sizes)
                {
                    if (s >= preferred && s < current)
                    {
                        if (const auto enabled = enabled_job(state, current - s))
                        {
                            return Action::shrink(s, Reason::PreferredMatch, enabled);
                        }
                        break;
                    }
                }
            }
        }

        if (toggles.wide_optimization)
        {
            for (const QueuedJob &q : state.queue)
            {
                if (q.size <= avail)
                {
                    continue;
                }
                for (auto s = sizes.rbegin(); s != sizes.rend(); ++s)
                {
                    if (*s < current && avail + (current - *s) >= q.size)
                    {
                        return Action::shrink(*s, Reason::WideOptShrink, q.id);
                    }
                }
            }
            const bool none_fits =
                std::none_of(state.queue.begin(), state.queue.end(), [&](const QueuedJob &q) { return q.size <= avail; });
            if (queue_empty || none_fits)
            {
                if (const auto target = largest_expansion(sizes, current, request.max_procs, free_nodes))
                {
                    return Action::expand(*target, Reason::WideOptExpand);
                }
            }
        }
        return Action::none(Reason::NoChange);
    }

    ResourceManager::ResourceManager(int total_nodes, bool backfill)
        : m_total(total_nodes), m_free(total_nodes), m_backfill(backfill)
    {
        if (total_nodes < 1)
        {
            throw invalid_argument("cluster needs at least one node");
        }
    }

    void ResourceManager::submit(const workload::JobDescriptor &job)
    {
        if (!m_known.insert(job.id).second)
        {
            throw invalid_argument("duplicate job id " + std::to_string(job.id));
        }
        if (job.initial_size > m_total)
        {
            m_unschedulable.push_back(job.id);
            return;
        }
        Entry e;
        e.id = job.id;
        e.size = job.initial_size;
        e.est_runtime = job.base_step_time * job.iterations;
        e.tier = TierNormal;
        e.order = m_submit_seq++;
        m_queue.push_back(e);
    }

    void ResourceManager::sort_queue()
    {
        std::stable_sort(m_queue.begin(), m_queue.end(), [](const Entry &a, const Entry &b) {
            if (a.tier != b.tier)
            {
                return a.tier < b.tier;
            }
            return a.order < b.order;
        });
    }

    ResourceManager::Start ResourceManager::grant(const Entry &e, SimTime now)
    {
        m_free -= e.size;
        if (e.resizer)
        {
            Running &r = m_running.at(e.id);
            r.alloc += e.size;
            m_resizers.at(e.id).state = ResizerJob::State::Granted;
            return Start{e.id, r.alloc, true};
        }
        Running r;
        r.alloc = e.size;
        r.est_end = now + e.est_runtime;
        m_running.emplace(e.id, r);
        return Start{e.id, e.size, false};
    }

    std::vector<ResourceManager::Start> ResourceManager::schedule_queue(SimTime now)
    {
        std::vector<Start> starts;
        if (m_queue.empty())
        {
            return starts;
        }
        sort_queue();

        std::optional<SimTime> shadow;
        int extra = 0;
        std::vector<Entry> remaining;
        remaining.reserve(m_queue.size());
        bool blocked = false;
        for (const Entry &e : m_queue)
        {
            if (blocked)
            {
                remaining.push_back(e);
                continue;
            }
            if (!shadow)
            {
                if (e.size <= m_free)
                {
                    starts.push_back(grant(e, now));
                    continue;
                }
                if (!m_backfill)
                {
                    blocked = true;
                    remaining.push_back(e);
                    continue;
                }
                // Reservation for the head: earliest time enough running nodes come back.
                std::vector<std::pair<SimTime, int>> releases;
                releases.reserve(m_running.size());
                for (const auto &[id, r] : m_running)
                {
                    releases.emplace_back(std::max(r.est_end, now), r.alloc);
                }
                std::sort(releases.begin(), releases.end());
                int avail = m_free;
                shadow = SimTime::max();
                for (const auto &[end, nodes] : releases)
                {
                    avail += nodes;
                    if (avail >= e.size)
                    {
                        shadow = end;
                        extra = avail - e.size;
                        break;
                    }
                }
                remaining.push_back(e);
                continue;
            }
            if (e.resizer || e.size > m_free)
            {
                remaining.push_back(e);
                continue;
            }
            if (now + e.est_runtime <= *shadow)
            {
                starts.push_back(grant(e, now));
            }
            else if (e.size <= extra)
            {
                extra -= e.size;
                starts.push_back(grant(e, now));
            }
            else
            {
                remaining.push_back(e);
            }
        }
        m_queue = std::move(remaining);
        return starts;
    }

    Action ResourceManager::decide(JobId job, const DmrRequest &request, const PolicyToggles &toggles)
    {
        const Action action = decide_action(snapshot(), job, request, toggles);
        if (action.boosted)
        {
            boost(*action.boosted);
        }
        return action;
    }

    ResizerJob ResourceManager::begin_expand(JobId job, int target, SimTime now, SimTime timeout)
    {
        const auto it = m_running.find(job);
        if (it == m_running.end())
        {
            throw contract_error("begin_expand: job " + std::to_string(job) + " is not running");
        }
        if (target <= it->second.alloc)
        {
            throw contract_error("begin_expand: target must exceed the current allocation");
        }
        if (m_resizers.count(job) && m_resizers.at(job).state == ResizerJob::State::Pending)
        {
            throw contract_error("begin_expand: job " + std::to_string(job) + " already has a pending resizer");
        }
        ResizerJob rj;
        rj.parent = job;
        rj.extra_nodes = target - it->second.alloc;
        rj.target = target;
        rj.submitted = now;
        rj.deadline = now + timeout;
        m_resizers[job] = rj;

        Entry e;
        e.id = job;
        e.size = rj.extra_nodes;
        e.tier = TierResizer;
        e.order = m_submit_seq++;
        e.resizer = true;
        if (e.size <= m_free)
        {
            grant(e, now);
        }
        else
        {
            m_queue.push_back(e);
        }
        return m_resizers.at(job);
    }

    void ResourceManager::cancel_resizer(JobId job)
    {
        const auto it = m_resizers.find(job);
        if (it == m_resizers.end() || it->second.state != ResizerJob::State::Pending)
        {
            return;
        }
        it->second.state = ResizerJob::State::Cancelled;
        std::erase_if(m_queue, [job](const Entry &e) { return e.resizer && e.id == job; });
    }

    std::optional<ResizerJob> ResourceManager::resizer(JobId job) const
    {
        const auto it = m_resizers.find(job);
        if (it == m_resizers.end())
        {
            return std::nullopt;
        }
        return it->second;
    }

    ResourceManager::Running &ResourceManager::running(JobId job, const char *what)
    {
        const auto it = m_running.find(job);
        if (it == m_running.end())
        {
            throw contract_error(std::string(what) + ": job " + std::to_string(job) + " is not running");
        }
        return it->second;
    }

    void ResourceManager::begin_shrink(JobId job, int target)
    {
        Running &r = running(job, "begin_shrink");
        if (target < 1 || target >= r.alloc)
        {
            throw contract_error("begin_shrink: target must lie in [1, allocation)");
        }
        if (r.shrinking_to)
        {
            throw contract_error("begin_shrink: shrink already in flight");
        }
        r.shrinking_to = target;
        m_releasing += r.alloc - target;
    }

    void ResourceManager::complete_shrink(JobId job, int target)
    {
        Running &r = running(job, "complete_shrink");
        if (!r.shrinking_to || *r.shrinking_to != target)
        {
            throw contract_error("complete_shrink: no matching shrink in flight for job " + std::to_string(job));
        }
        const int released = r.alloc - target;
        r.alloc = target;
        r.shrinking_to.reset();
        m_releasing -= released;
        m_free += released;
    }

    void ResourceManager::finish(JobId job)
    {
        const auto it = m_running.find(job);
        if (it == m_running.end())
        {
            throw contract_error("finish: job " + std::to_string(job) + " is not running");
        }
        cancel_resizer(job);
        if (it->second.shrinking_to)
        {
            m_releasing -= it->second.alloc - *it->second.shrinking_to;
        }
        m_free += it->second.alloc;
        m_running.erase(it);
    }

    void ResourceManager::set_estimated_end(JobId job, SimTime end)
    {
        running(job, "set_estimated_end").est_end = end;
    }

    void ResourceManager::boost(JobId job)
    {
        for (Entry &e : m_queue)
        {
            if (!e.resizer && e.id == job)
            {
                if (e.tier != TierBoosted)
                {
                    e.tier = TierBoosted;
                    e.order = m_boost_seq++;
                }
                return;
            }
        }
    }

    ClusterState ResourceManager::snapshot() const
    {
        ClusterState s;
        s.total_nodes = m_total;
        s.free_nodes = m_free;
        s.releasing_nodes = m_releasing;
        for (const auto &[id, r] : m_running)
        {
            s.allocations.emplace(id, r.alloc);
        }
        std::vector<Entry> ordered;
        for (const Entry &e : m_queue)
        {
            if (!e.resizer)
            {
                ordered.push_back(e);
            }
        }
        std::stable_sort(ordered.begin(), ordered.end(), [](const Entry &a, const Entry &b) {
            return a.tier != b.tier ? a.tier < b.tier : a.order < b.order;
        });
        for (const Entry &e : ordered)
        {
            s.queue.push_back(QueuedJob{e.id, e.size});
        }
        return s;
    }

    int ResourceManager::allocated_nodes() const noexcept
    {
        int sum = 0;
        for (const auto &[id, r] : m_running)
        {
            sum += r.alloc;
        }
        return sum;
    }

    int ResourceManager::allocation(JobId job) const
    {
        const auto it = m_running.find(job);
        return it == m_running.end() ? 0 : it->second.alloc;
    }

    bool ResourceManager::is_queued(JobId job) const
    {
        return std::any_of(m_queue.begin(), m_queue.end(), [job](const Entry &e) { return !e.resizer && e.id == job; });
    }

    bool ResourceManager::is_boosted(JobId job) const
    {
        return std::any_of(m_queue.begin(), m_queue.end(),
                           [job](const Entry &e) { return !e.resizer && e.id == job && e.tier == TierBoosted; });
    }

    bool ResourceManager::conserved() const noexcept
    {
        return m_free >= 0 && m_releasing >= 0 && m_free + allocated_nodes() == m_total;
    }
} // namespace dmrsim::rms
