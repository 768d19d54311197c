#include "dmrsim/metrics.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace dmrsim::metrics
{
    std::string_view to_string(Outcome outcome) noexcept
    {
        switch (outcome)
        {
        case Outcome::Applied:
            return "applied";
        case Outcome::TimedOut:
            return "timed_out";
        case Outcome::Discarded:
            return "discarded";
        case Outcome::Pending:
            return "pending";
        }
        return "?";
    }

    std::optional<UtilizationStats> utilization(std::span<const TimelinePoint> timeline, SimTime start,
                                                SimTime makespan, int total_nodes)
    {
        if (makespan <= SimTime::zero() || total_nodes <= 0)
        {
            return std::nullopt;
        }
        const SimTime end = start + makespan;

        // Piecewise-constant segments clipped to [start, end].
        struct Segment
        {
            double fraction;
            double dt;
        };
        std::vector<Segment> segments;
        int current = 0;
        SimTime cursor = start;
        for (const TimelinePoint &p : timeline)
        {
            if (p.time > cursor)
            {
                const SimTime seg_end = std::min(p.time, end);
                if (seg_end > cursor)
                {
                    segments.push_back({static_cast<double>(current) / total_nodes,
                                        static_cast<double>((seg_end - cursor).micros())});
                    cursor = seg_end;
                }
            }
            current = p.allocated;
            if (cursor >= end)
            {
                break;
            }
        }
        if (cursor < end)
        {
            segments.push_back({static_cast<double>(current) / total_nodes, static_cast<double>((end - cursor).micros())});
        }

        const double span = static_cast<double>(makespan.micros());
        double mean = 0.0;
        for (const Segment &s : segments)
        {
            mean += s.fraction * s.dt;
        }
        mean /= span;
        double var = 0.0;
        for (const Segment &s : segments)
        {
            var += (s.fraction - mean) * (s.fraction - mean) * s.dt;
        }
        var /= span;
        return UtilizationStats{mean * 100.0, std::sqrt(std::max(0.0, var)) * 100.0};
    }

    ActionStats action_stats(std::span<const ActionRecord> actions, ActionKind kind, std::size_t jobs)
    {
        ActionStats st;
        std::vector<double> durations;
        for (const ActionRecord &a : actions)
        {
            if (a.kind != kind)
            {
                continue;
            }
            ++st.count;
            if (a.outcome == Outcome::Applied || a.outcome == Outcome::TimedOut)
            {
                durations.push_back(a.duration.seconds());
            }
        }
        st.per_job = jobs == 0 ? 0.0 : static_cast<double>(st.count) / static_cast<double>(jobs);
        if (!durations.empty())
        {
            st.min = *std::min_element(durations.begin(), durations.end());
            st.max = *std::max_element(durations.begin(), durations.end());
            double sum = 0.0;
            for (const double d : durations)
            {
                sum += d;
            }
            st.avg = sum / durations.size();
            double var = 0.0;
            for (const double d : durations)
            {
                var += (d - st.avg) * (d - st.avg);
            }
            st.std = std::sqrt(var / durations.size());
        }
        return st;
    }

    void finalize(RunSummary &summary)
    {
        summary.jobs_completed = 0;
        summary.jobs_unschedulable = 0;
        std::optional<SimTime> first;
        std::optional<SimTime> last;
        double wait = 0.0;
        double exec = 0.0;
        double completion = 0.0;
        for (const JobTiming &j : summary.jobs)
        {
            if (!first || j.arrival < *first)
            {
                first = j.arrival;
            }
            if (j.unschedulable)
            {
                ++summary.jobs_unschedulable;
                continue;
            }
            if (!j.completed())
            {
                continue;
            }
            ++summary.jobs_completed;
            if (!last || *j.finish > *last)
            {
                last = *j.finish;
            }
            wait += j.wait().seconds();
            exec += j.exec().seconds();
            completion += j.completion().seconds();
        }
        summary.first_arrival = first.value_or(SimTime::zero());
        summary.makespan = last ? *last - summary.first_arrival : SimTime::zero();
        const double n = static_cast<double>(summary.jobs_completed);
        summary.mean_wait = n > 0 ? wait / n : 0.0;
        summary.mean_exec = n > 0 ? exec / n : 0.0;
        summary.mean_completion = n > 0 ? completion / n : 0.0;
        summary.utilization = utilization(summary.timeline, summary.first_arrival, summary.makespan, summary.total_nodes);
        for (const ActionKind kind : {ActionKind::None, ActionKind::Expand, ActionKind::Shrink})
        {
            summary.action_stats[static_cast<std::size_t>(kind)] =
                action_stats(summary.actions, kind, summary.jobs.size());
        }
    }

    double gain_percent(double fixed, double flexible)
    {
        if (fixed == 0.0)
        {
            return 0.0;
        }
        return (fixed - flexible) / fixed * 100.0;
    }

    GainReport gain_report(const RunSummary &fixed, const RunSummary &flexible)
    {
        if (fixed.workload_fingerprint != flexible.workload_fingerprint || fixed.jobs.size() != flexible.jobs.size())
        {
            throw invalid_argument("gain_report: runs were not made over the same workload");
        }
        GainReport report;
        report.makespan = gain_percent(fixed.makespan.seconds(), flexible.makespan.seconds());
        report.wait = gain_percent(fixed.mean_wait, flexible.mean_wait);
        report.exec = gain_percent(fixed.mean_exec, flexible.mean_exec);
        report.completion = gain_percent(fixed.mean_completion, flexible.mean_completion);
        for (std::size_t i = 0; i < fixed.jobs.size(); ++i)
        {
            const JobTiming &a = fixed.jobs[i];
            const JobTiming &b = flexible.jobs[i];
            if (a.id != b.id)
            {
                throw invalid_argument("gain_report: job order differs between runs");
            }
            if (!a.completed() || !b.completed())
            {
                continue;
            }
            report.per_job.push_back(PairedDifference{a.id, (a.wait() - b.wait()).seconds(),
                                                      (a.exec() - b.exec()).seconds(),
                                                      (a.completion() - b.completion()).seconds()});
        }
        return report;
    }

    namespace
    {
        std::string fixed6(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", v);
            return buf;
        }
    } // namespace

    void write_jobs_csv(std::ostream &out, const RunSummary &summary)
    {
        out << "id,app,flexible,arrival,start,finish,wait,exec,completion,resizes\n";
        for (const JobTiming &j : summary.jobs)
        {
            out << j.id << ',' << to_string(j.app) << ',' << (j.flexible ? 1 : 0) << ',' << j.arrival.to_string() << ',';
            if (j.completed())
            {
                out << j.start->to_string() << ',' << j.finish->to_string() << ',' << j.wait().to_string() << ','
                    << j.exec().to_string() << ',' << j.completion().to_string();
            }
            else
            {
                out << (j.start ? j.start->to_string() : "") << ",,,,";
            }
            out << ',' << j.resizes << '\n';
        }
    }

    void write_timeline_csv(std::ostream &out, const RunSummary &summary)
    {
        out << "time,allocated,running,completed\n";
        for (const TimelinePoint &p : summary.timeline)
        {
            out << p.time.to_string() << ',' << p.allocated << ',' << p.running << ',' << p.completed << '\n';
        }
    }

    void write_actions_csv(std::ostream &out, const RunSummary &summary)
    {
        out << "time,job,kind,target,duration,reason\n";
        for (const ActionRecord &a : summary.actions)
        {
            out << a.time.to_string() << ',' << a.job << ',' << to_string(a.kind) << ',' << a.target << ','
                << a.duration.to_string() << ',' << to_string(a.reason) << '\n';
        }
    }

    void write_summary_header(std::ostream &out)
    {
        out << "run,metric,value\n";
    }

    void write_summary_rows(std::ostream &out, const RunSummary &s)
    {
        auto row = [&](const char *metric, const std::string &value) {
            out << s.label << ',' << metric << ',' << value << '\n';
        };
        row("jobs", std::to_string(s.jobs.size()));
        row("completed", std::to_string(s.jobs_completed));
        row("unschedulable", std::to_string(s.jobs_unschedulable));
        row("makespan", s.makespan.to_string());
        row("utilization_avg", s.utilization ? fixed6(s.utilization->avg) : "");
        row("utilization_std", s.utilization ? fixed6(s.utilization->std) : "");
        row("mean_wait", fixed6(s.mean_wait));
        row("mean_exec", fixed6(s.mean_exec));
        row("mean_completion", fixed6(s.mean_completion));
        row("forwarded_checks", std::to_string(s.forwarded_checks));
        row("inhibited_checks", std::to_string(s.inhibited_checks));
        for (const ActionKind kind : {ActionKind::None, ActionKind::Expand, ActionKind::Shrink})
        {
            const ActionStats &st = s.stats(kind);
            const std::string k(to_string(kind));
            out << s.label << ",action_" << k << "_count," << st.count << '\n';
            out << s.label << ",action_" << k << "_per_job," << fixed6(st.per_job) << '\n';
            out << s.label << ",action_" << k << "_min," << fixed6(st.min) << '\n';
            out << s.label << ",action_" << k << "_max," << fixed6(st.max) << '\n';
            out << s.label << ",action_" << k << "_avg," << fixed6(st.avg) << '\n';
            out << s.label << ",action_" << k << "_std," << fixed6(st.std) << '\n';
        }
    }

    void write_gain_rows(std::ostream &out, const GainReport &g)
    {
        out << "gain,makespan_pct," << fixed6(g.makespan) << '\n';
        out << "gain,mean_wait_pct," << fixed6(g.wait) << '\n';
        out << "gain,mean_exec_pct," << fixed6(g.exec) << '\n';
        out << "gain,mean_completion_pct," << fixed6(g.completion) << '\n';
    }
} // namespace dmrsim::metrics
