#include "dmrsim/workload.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace dmrsim::workload
{
    void WorkloadParams::validate() const
    {
        if (max_job_size < 1)
        {
            throw invalid_argument("max_job_size must be at least 1");
        }
        if (!(mean_interarrival > 0.0))
        {
            throw invalid_argument("mean_interarrival must be positive");
        }
        if (!(max_step_runtime > 0.0))
        {
            throw invalid_argument("max_step_runtime must be positive");
        }
        if (iterations && *iterations < 1)
        {
            throw invalid_argument("iterations must be positive");
        }
        if (!(flexible_ratio >= 0.0 && flexible_ratio <= 1.0))
        {
            throw invalid_argument("flexible_ratio must lie in [0, 1]");
        }
        double total = 0.0;
        for (const double w : app_mix)
        {
            if (!(w >= 0.0))
            {
                throw invalid_argument("app_mix weights must be non-negative");
            }
            total += w;
        }
        if (std::fabs(total - 1.0) > 1e-9)
        {
            throw invalid_argument("app_mix weights must sum to 1");
        }
        if (factor < 2)
        {
            throw invalid_argument("factor must be at least 2");
        }
        if (!(pow2_snap_prob >= 0.0 && pow2_snap_prob <= 1.0))
        {
            throw invalid_argument("pow2_snap_prob must lie in [0, 1]");
        }
        if (!(runtime_mean_small > 0.0) || !(runtime_mean_large > 0.0))
        {
            throw invalid_argument("runtime means must be positive");
        }
        if (!(runtime_branch_prob >= 0.0 && runtime_branch_prob <= 1.0))
        {
            throw invalid_argument("runtime_branch_prob must lie in [0, 1]");
        }
        if (!(runtime_branch_ratio > 0.0))
        {
            throw invalid_argument("runtime_branch_ratio must be positive");
        }
    }

    void JobDescriptor::validate() const
    {
        const std::string who = "job " + std::to_string(id) + ": ";
        if (min_procs < 1 || min_procs > initial_size || initial_size > max_procs)
        {
            throw invalid_argument(who + "need 1 <= min_procs <= initial_size <= max_procs");
        }
        if (preferred_procs && (*preferred_procs < min_procs || *preferred_procs > max_procs))
        {
            throw invalid_argument(who + "preferred_procs outside [min_procs, max_procs]");
        }
        if (factor < 2)
        {
            throw invalid_argument(who + "factor must be at least 2");
        }
        if (iterations < 1)
        {
            throw invalid_argument(who + "iterations must be positive");
        }
        if (base_step_time <= SimTime::zero())
        {
            throw invalid_argument(who + "step time must be positive");
        }
        if (arrival < SimTime::zero())
        {
            throw invalid_argument(who + "negative arrival time");
        }
    }

    namespace
    {
        int nearest_power_of_two(int n, int max)
        {
            int lower = 1;
            while (lower * 2 <= n)
            {
                lower *= 2;
            }
            const int upper = lower * 2;
            if (upper <= max && upper - n < n - lower)
            {
                return upper;
            }
            return lower;
        }
    } // namespace

    int sample_job_size(RngStream &rng, int max_job_size, double pow2_snap_prob)
    {
        if (max_job_size < 1)
        {
            throw invalid_argument("max_job_size must be at least 1");
        }
        const double u = rng.uniform() * std::log2(static_cast<double>(max_job_size));
        int size = static_cast<int>(std::lround(std::exp2(u)));
        size = std::clamp(size, 1, max_job_size);
        if (rng.bernoulli(pow2_snap_prob))
        {
            size = nearest_power_of_two(size, max_job_size);
        }
        return size;
    }

    SimTime sample_step_runtime(int size, RngStream &rng, const WorkloadParams &params)
    {
        if (size < 1)
        {
            throw invalid_argument("job size must be at least 1");
        }
        const int bounded = std::min(size, params.max_job_size);
        const double position =
            params.max_job_size > 1 ? static_cast<double>(bounded - 1) / (params.max_job_size - 1) : 0.0;
        const double short_mean =
            params.runtime_mean_small + (params.runtime_mean_large - params.runtime_mean_small) * position;
        const bool short_branch = rng.bernoulli(params.runtime_branch_prob);
        const double mean = short_branch ? short_mean : short_mean * params.runtime_branch_ratio;
        const double sample = std::min(rng.exponential(mean), params.max_step_runtime);
        return SimTime::from_micros(std::max<std::int64_t>(1, SimTime::from_seconds(sample).micros()));
    }

    std::vector<JobDescriptor> generate_workload(const WorkloadParams &params, const appmodel::AppCatalog &apps)
    {
        params.validate();

        RngStream arrivals = RngStream::derive(params.seed, "arrivals");
        RngStream sizes = RngStream::derive(params.seed, "sizes");
        RngStream runtimes = RngStream::derive(params.seed, "runtimes");
        RngStream mix = RngStream::derive(params.seed, "apps");
        RngStream tagging = RngStream::derive(params.seed, "tagging");

        std::vector<JobDescriptor> jobs;
        jobs.reserve(params.jobs);
        double clock = 0.0;
        SimTime last = SimTime::zero();
        for (std::uint32_t i = 0; i < params.jobs; ++i)
        {
            clock += arrivals.exponential(params.mean_interarrival);
            SimTime arrival = SimTime::from_seconds(clock);
            if (i > 0 && arrival <= last)
            {
                arrival = last + SimTime::from_micros(1);
            }
            last = arrival;

            const double pick = mix.uniform();
            AppKind kind = AppKind::FS;
            double acc = 0.0;
            for (std::size_t a = 0; a < params.app_mix.size(); ++a)
            {
                acc += params.app_mix[a];
                if (params.app_mix[a] > 0.0 && pick < acc)
                {
                    kind = static_cast<AppKind>(a);
                    break;
                }
            }
            const appmodel::AppModel &app = apps.at(kind);

            JobDescriptor job;
            job.id = i + 1;
            job.arrival = arrival;
            job.app = kind;
            job.factor = params.factor;
            job.data_volume = params.data_volume;
            job.iterations = params.iterations.value_or(app.iterations);

            const int sampled = sample_job_size(sizes, params.max_job_size, params.pow2_snap_prob);
            if (kind == AppKind::FS)
            {
                // FS scales to whatever the job-size bound allows.
                job.initial_size = sampled;
                job.min_procs = app.min_procs;
                job.max_procs = params.max_job_size;
            }
            else
            {
                // Real applications are submitted at their maximum.
                job.initial_size = app.max_procs;
                job.min_procs = app.min_procs;
                job.max_procs = app.max_procs;
                job.preferred_procs = app.preferred;
            }
            job.base_step_time = sample_step_runtime(job.initial_size, runtimes, params);
            job.flexible = tagging.bernoulli(params.flexible_ratio);
            jobs.push_back(job);
        }
        return jobs;
    }

    std::string serialize_workload(std::span<const JobDescriptor> jobs)
    {
        std::ostringstream out;
        out << "# id,arrival,size,min,max,preferred,factor,flexible,app,iterations,step_time,data_volume\n";
        for (const JobDescriptor &j : jobs)
        {
            out << j.id << ',' << j.arrival.to_string() << ',' << j.initial_size << ',' << j.min_procs << ','
                << j.max_procs << ',';
            if (j.preferred_procs)
            {
                out << *j.preferred_procs;
            }
            else
            {
                out << '-';
            }
            out << ',' << j.factor << ',' << (j.flexible ? 1 : 0) << ',' << to_string(j.app) << ',' << j.iterations
                << ',' << j.base_step_time.to_string() << ',' << j.data_volume << '\n';
        }
        return out.str();
    }

    namespace
    {
        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
            {
                s.remove_prefix(1);
            }
            while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            {
                s.remove_suffix(1);
            }
            return s;
        }

        template <typename T>
        T parse_integer(std::string_view field, std::size_t line, const char *name)
        {
            T value{};
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
            if (ec != std::errc() || ptr != field.data() + field.size())
            {
                throw ParseError(line, std::string("invalid ") + name + " '" + std::string(field) + "'");
            }
            return value;
        }
    } // namespace

    std::vector<JobDescriptor> parse_workload(std::string_view text)
    {
        std::vector<JobDescriptor> jobs;
        std::size_t line_no = 0;
        while (!text.empty())
        {
            const std::size_t nl = text.find('\n');
            std::string_view line = trim(text.substr(0, nl));
            text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
            ++line_no;
            if (line.empty() || line.front() == '#')
            {
                continue;
            }

            std::vector<std::string_view> fields;
            while (true)
            {
                const std::size_t comma = line.find(',');
                fields.push_back(trim(line.substr(0, comma)));
                if (comma == std::string_view::npos)
                {
                    break;
                }
                line.remove_prefix(comma + 1);
            }
            if (fields.size() != 12)
            {
                throw ParseError(line_no, "expected 12 fields, found " + std::to_string(fields.size()));
            }

            JobDescriptor job;
            try
            {
                job.id = parse_integer<JobId>(fields[0], line_no, "id");
                job.arrival = SimTime::parse(fields[1]);
                job.initial_size = parse_integer<int>(fields[2], line_no, "size");
                job.min_procs = parse_integer<int>(fields[3], line_no, "min");
                job.max_procs = parse_integer<int>(fields[4], line_no, "max");
                if (fields[5] != "-")
                {
                    job.preferred_procs = parse_integer<int>(fields[5], line_no, "preferred");
                }
                job.factor = parse_integer<int>(fields[6], line_no, "factor");
                if (fields[7] != "0" && fields[7] != "1")
                {
                    throw ParseError(line_no, "flexible must be 0 or 1");
                }
                job.flexible = fields[7] == "1";
                const auto app = parse_app_kind(fields[8]);
                if (!app)
                {
                    throw ParseError(line_no, "unknown application '" + std::string(fields[8]) + "'");
                }
                job.app = *app;
                job.iterations = parse_integer<int>(fields[9], line_no, "iterations");
                job.base_step_time = SimTime::parse(fields[10]);
                job.data_volume = parse_integer<std::uint64_t>(fields[11], line_no, "data_volume");
                job.validate();
            }
            catch (const ParseError &)
            {
                throw;
            }
            catch (const Error &e)
            {
                throw ParseError(line_no, e.what());
            }
            for (const JobDescriptor &other : jobs)
            {
                if (other.id == job.id)
                {
                    throw ParseError(line_no, "duplicate job id " + std::to_string(job.id));
                }
            }
            jobs.push_back(job);
        }
        return jobs;
    }

    std::vector<JobDescriptor> as_fixed(std::span<const JobDescriptor> jobs)
    {
        std::vector<JobDescriptor> out(jobs.begin(), jobs.end());
        for (JobDescriptor &j : out)
        {
            j.flexible = false;
        }
        return out;
    }

    std::uint64_t fingerprint(std::span<const JobDescriptor> jobs)
    {
        std::uint64_t h = 0xCBF29CE484222325ull;
        auto mix = [&h](std::uint64_t v) {
            for (int i = 0; i < 8; ++i)
            {
                h ^= (v >> (8 * i)) & 0xFF;
                h *= 0x100000001B3ull;
            }
        };
        for (const JobDescriptor &j : jobs)
        {
            mix(j.id);
            mix(static_cast<std::uint64_t>(j.arrival.micros()));
            mix(static_cast<std::uint64_t>(j.initial_size));
            mix(static_cast<std::uint64_t>(j.min_procs));
            mix(static_cast<std::uint64_t>(j.max_procs));
            mix(j.preferred_procs ? static_cast<std::uint64_t>(*j.preferred_procs) : ~0ull);
            mix(static_cast<std::uint64_t>(j.factor));
            mix(static_cast<std::uint64_t>(j.app));
            mix(static_cast<std::uint64_t>(j.iterations));
            mix(static_cast<std::uint64_t>(j.base_step_time.micros()));
            mix(j.data_volume);
        }
        return h;
    }
} // namespace dmrsim::workload
