#include "dmrsim/scenario.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <thread>

namespace dmrsim::scenario
{
    namespace
    {
        namespace fs = std::filesystem;

        std::string_view trim(std::string_view s)
        {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front())))
            {
                s.remove_prefix(1);
            }
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back())))
            {
                s.remove_suffix(1);
            }
            return s;
        }

        std::string lower(std::string_view s)
        {
            std::string out(s);
            std::transform(out.begin(), out.end(), out.begin(),
                           [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
            return out;
        }

        Error bad_value(std::string_view what, std::string_view value)
        {
            return invalid_argument("invalid value '" + std::string(value) + "' for " + std::string(what));
        }

        bool parse_bool(std::string_view v)
        {
            const std::string s = lower(v);
            if (s == "true" || s == "1" || s == "yes" || s == "on")
            {
                return true;
            }
            if (s == "false" || s == "0" || s == "no" || s == "off")
            {
                return false;
            }
            throw bad_value("a boolean", v);
        }

        template <typename T>
        T parse_integer(std::string_view v)
        {
            T out{};
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
            {
                throw bad_value("an integer", v);
            }
            return out;
        }

        double parse_double(std::string_view v)
        {
            double out = 0.0;
            const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
            if (v.empty() || ec != std::errc() || ptr != v.data() + v.size())
            {
                throw bad_value("a number", v);
            }
            return out;
        }

        SimTime parse_time(std::string_view v)
        {
            try
            {
                return SimTime::parse(v);
            }
            catch (const Error &)
            {
                throw bad_value("a time in seconds", v);
            }
        }

        std::optional<SimTime> parse_optional_time(std::string_view v)
        {
            if (lower(v) == "none")
            {
                return std::nullopt;
            }
            return parse_time(v);
        }

        std::string format_double(double v)
        {
            char buf[64];
            const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
            return std::string(buf, ptr);
        }

        std::string format_bool(bool b) { return b ? "true" : "false"; }

        std::string format_optional_time(const std::optional<SimTime> &t)
        {
            return t ? t->to_string() : "none";
        }

        constexpr std::array<AppKind, 4> all_apps{AppKind::FS, AppKind::CG, AppKind::Jacobi, AppKind::Nbody};

        std::array<double, 4> parse_app_mix(std::string_view v)
        {
            std::array<double, 4> mix{0.0, 0.0, 0.0, 0.0};
            std::string_view rest = v;
            while (!rest.empty())
            {
                const std::size_t comma = rest.find(',');
                const std::string_view item = trim(rest.substr(0, comma));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
                const std::size_t colon = item.find(':');
                if (colon == std::string_view::npos)
                {
                    throw bad_value("app_mix (expected app:weight,...)", v);
                }
                const std::optional<AppKind> kind = parse_app_kind(trim(item.substr(0, colon)));
                if (!kind)
                {
                    throw bad_value("app_mix (unknown application)", v);
                }
                mix[static_cast<std::size_t>(*kind)] = parse_double(trim(item.substr(colon + 1)));
            }
            return mix;
        }

        std::string format_app_mix(const std::array<double, 4> &mix)
        {
            std::string out;
            for (const AppKind kind : all_apps)
            {
                if (!out.empty())
                {
                    out += ',';
                }
                out += std::string(to_string(kind)) + ':' + format_double(mix[static_cast<std::size_t>(kind)]);
            }
            return out;
        }

        std::vector<std::uint64_t> parse_seeds(std::string_view v)
        {
            std::vector<std::uint64_t> seeds;
            if (lower(v) == "none")
            {
                return seeds;
            }
            std::string_view rest = v;
            while (!rest.empty())
            {
                const std::size_t comma = rest.find(',');
                const std::string_view item = trim(rest.substr(0, comma));
                rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
                const std::size_t dash = item.find('-');
                if (dash != std::string_view::npos)
                {
                    const auto lo = parse_integer<std::uint64_t>(trim(item.substr(0, dash)));
                    const auto hi = parse_integer<std::uint64_t>(trim(item.substr(dash + 1)));
                    if (hi < lo || hi - lo > 100000)
                    {
                        throw bad_value("seeds", v);
                    }
                    for (std::uint64_t s = lo; s <= hi; ++s)
                    {
                        seeds.push_back(s);
                    }
                    continue;
                }
                seeds.push_back(parse_integer<std::uint64_t>(item));
            }
            return seeds;
        }

        std::string format_seeds(const std::vector<std::uint64_t> &seeds)
        {
            if (seeds.empty())
            {
                return "none";
            }
            std::string out;
            for (const std::uint64_t s : seeds)
            {
                if (!out.empty())
                {
                    out += ',';
                }
                out += std::to_string(s);
            }
            return out;
        }

        struct Key
        {
            std::string section;
            std::string name;
            std::function<void(Scenario &, std::string_view)> set;
            std::function<std::optional<std::string>(const Scenario &)> get; // nullopt: emitted commented out
        };

        using Setter = std::function<void(Scenario &, std::string_view)>;
        using Getter = std::function<std::optional<std::string>(const Scenario &)>;

        std::vector<Key> build_keys()
        {
            std::vector<Key> k;
            auto add = [&](std::string section, std::string name, Setter set, Getter get) {
                k.push_back(Key{std::move(section), std::move(name), std::move(set), std::move(get)});
            };

            add("cluster", "nodes",
                [](Scenario &s, std::string_view v) { s.sim.nodes = parse_integer<int>(v); },
                [](const Scenario &s) { return std::to_string(s.sim.nodes); });
            add("cluster", "backfill",
                [](Scenario &s, std::string_view v) { s.sim.policy.backfill = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.sim.policy.backfill); });

            add("workload", "jobs",
                [](Scenario &s, std::string_view v) {
                    if (s.replay)
                    {
                        throw invalid_argument("jobs and replay are mutually exclusive");
                    }
                    s.workload.jobs = parse_integer<std::uint32_t>(v);
                    s.has_workload = true;
                },
                [](const Scenario &s) -> std::optional<std::string> {
                    if (!s.has_workload)
                    {
                        return std::nullopt;
                    }
                    return std::to_string(s.workload.jobs);
                });
            add("workload", "replay",
                [](Scenario &s, std::string_view v) {
                    if (s.has_workload)
                    {
                        throw invalid_argument("jobs and replay are mutually exclusive");
                    }
                    if (v.empty())
                    {
                        throw bad_value("replay", v);
                    }
                    s.replay = std::string(v);
                },
                [](const Scenario &s) { return s.replay; });
            add("workload", "max_job_size",
                [](Scenario &s, std::string_view v) { s.workload.max_job_size = parse_integer<int>(v); },
                [](const Scenario &s) { return std::to_string(s.workload.max_job_size); });
            add("workload", "mean_interarrival",
                [](Scenario &s, std::string_view v) { s.workload.mean_interarrival = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.mean_interarrival); });
            add("workload", "max_step_runtime",
                [](Scenario &s, std::string_view v) { s.workload.max_step_runtime = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.max_step_runtime); });
            add("workload", "iterations",
                [](Scenario &s, std::string_view v) {
                    if (lower(v) == "default")
                    {
                        s.workload.iterations.reset();
                        return;
                    }
                    s.workload.iterations = parse_integer<int>(v);
                },
                [](const Scenario &s) {
                    return s.workload.iterations ? std::to_string(*s.workload.iterations) : std::string("default");
                });
            add("workload", "flexible_ratio",
                [](Scenario &s, std::string_view v) { s.workload.flexible_ratio = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.flexible_ratio); });
            add("workload", "app_mix",
                [](Scenario &s, std::string_view v) { s.workload.app_mix = parse_app_mix(v); },
                [](const Scenario &s) { return format_app_mix(s.workload.app_mix); });
            add("workload", "seed",
                [](Scenario &s, std::string_view v) { s.workload.seed = parse_integer<std::uint64_t>(v); },
                [](const Scenario &s) { return std::to_string(s.workload.seed); });
            add("workload", "factor",
                [](Scenario &s, std::string_view v) { s.workload.factor = parse_integer<int>(v); },
                [](const Scenario &s) { return std::to_string(s.workload.factor); });
            add("workload", "data_volume",
                [](Scenario &s, std::string_view v) { s.workload.data_volume = parse_integer<std::uint64_t>(v); },
                [](const Scenario &s) { return std::to_string(s.workload.data_volume); });
            add("workload", "pow2_snap_prob",
                [](Scenario &s, std::string_view v) { s.workload.pow2_snap_prob = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.pow2_snap_prob); });
            add("workload", "runtime_mean_small",
                [](Scenario &s, std::string_view v) { s.workload.runtime_mean_small = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.runtime_mean_small); });
            add("workload", "runtime_mean_large",
                [](Scenario &s, std::string_view v) { s.workload.runtime_mean_large = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.runtime_mean_large); });
            add("workload", "runtime_branch_prob",
                [](Scenario &s, std::string_view v) { s.workload.runtime_branch_prob = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.runtime_branch_prob); });
            add("workload", "runtime_branch_ratio",
                [](Scenario &s, std::string_view v) { s.workload.runtime_branch_ratio = parse_double(v); },
                [](const Scenario &s) { return format_double(s.workload.runtime_branch_ratio); });

            add("policy", "mode",
                [](Scenario &s, std::string_view v) {
                    const std::string m = lower(v);
                    if (m == "sync")
                    {
                        s.sim.policy.mode = simcore::SchedulingMode::Sync;
                    }
                    else if (m == "async")
                    {
                        s.sim.policy.mode = simcore::SchedulingMode::Async;
                    }
                    else
                    {
                        throw bad_value("mode (sync or async)", v);
                    }
                },
                [](const Scenario &s) { return std::string(simcore::to_string(s.sim.policy.mode)); });
            add("policy", "expand_timeout",
                [](Scenario &s, std::string_view v) { s.sim.policy.expand_timeout = parse_time(v); },
                [](const Scenario &s) { return s.sim.policy.expand_timeout.to_string(); });
            add("policy", "requested_action",
                [](Scenario &s, std::string_view v) { s.sim.policy.toggles.requested_action = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.sim.policy.toggles.requested_action); });
            add("policy", "preferred",
                [](Scenario &s, std::string_view v) { s.sim.policy.toggles.preferred = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.sim.policy.toggles.preferred); });
            add("policy", "wide_optimization",
                [](Scenario &s, std::string_view v) { s.sim.policy.toggles.wide_optimization = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.sim.policy.toggles.wide_optimization); });
            add("policy", "inhibitor",
                [](Scenario &s, std::string_view v) {
                    if (lower(v) == "default")
                    {
                        s.sim.policy.inhibitor_period.reset();
                        return;
                    }
                    s.sim.policy.inhibitor_period = parse_optional_time(v);
                },
                [](const Scenario &s) {
                    return s.sim.policy.inhibitor_period ? format_optional_time(*s.sim.policy.inhibitor_period)
                                                         : std::string("default");
                });

            add("cost", "bandwidth",
                [](Scenario &s, std::string_view v) { s.sim.cost.bandwidth = parse_double(v); },
                [](const Scenario &s) { return format_double(s.sim.cost.bandwidth); });
            add("cost", "shrink_sync_base",
                [](Scenario &s, std::string_view v) { s.sim.cost.shrink_sync_base = parse_double(v); },
                [](const Scenario &s) { return format_double(s.sim.cost.shrink_sync_base); });
            add("cost", "shrink_sync_per_ratio",
                [](Scenario &s, std::string_view v) { s.sim.cost.shrink_sync_per_ratio = parse_double(v); },
                [](const Scenario &s) { return format_double(s.sim.cost.shrink_sync_per_ratio); });
            add("cost", "sched_base",
                [](Scenario &s, std::string_view v) { s.sim.cost.sched_base = parse_double(v); },
                [](const Scenario &s) { return format_double(s.sim.cost.sched_base); });
            add("cost", "sched_per_node",
                [](Scenario &s, std::string_view v) { s.sim.cost.sched_per_node = parse_double(v); },
                [](const Scenario &s) { return format_double(s.sim.cost.sched_per_node); });

            add("run", "name",
                [](Scenario &s, std::string_view v) { s.name = std::string(v); },
                [](const Scenario &s) { return s.name; });
            add("run", "paired",
                [](Scenario &s, std::string_view v) { s.paired = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.paired); });
            add("run", "out",
                [](Scenario &s, std::string_view v) { s.out_dir = std::string(v); },
                [](const Scenario &s) { return s.out_dir; });
            add("run", "seeds",
                [](Scenario &s, std::string_view v) { s.seeds = parse_seeds(v); },
                [](const Scenario &s) { return format_seeds(s.seeds); });
            add("run", "until",
                [](Scenario &s, std::string_view v) { s.until = parse_optional_time(v); },
                [](const Scenario &s) { return format_optional_time(s.until); });
            add("run", "trace_plans",
                [](Scenario &s, std::string_view v) { s.sim.trace_plans = parse_bool(v); },
                [](const Scenario &s) { return format_bool(s.sim.trace_plans); });

            for (const AppKind kind : all_apps)
            {
                const std::string section = "app." + lower(to_string(kind));
                add(section, "parallel_fraction",
                    [kind](Scenario &s, std::string_view v) { s.sim.apps.at(kind).parallel_fraction = parse_double(v); },
                    [kind](const Scenario &s) { return format_double(s.sim.apps.at(kind).parallel_fraction); });
                add(section, "min_procs",
                    [kind](Scenario &s, std::string_view v) { s.sim.apps.at(kind).min_procs = parse_integer<int>(v); },
                    [kind](const Scenario &s) { return std::to_string(s.sim.apps.at(kind).min_procs); });
                add(section, "max_procs",
                    [kind](Scenario &s, std::string_view v) { s.sim.apps.at(kind).max_procs = parse_integer<int>(v); },
                    [kind](const Scenario &s) { return std::to_string(s.sim.apps.at(kind).max_procs); });
                add(section, "preferred",
                    [kind](Scenario &s, std::string_view v) {
                        auto &app = s.sim.apps.at(kind);
                        if (lower(v) == "none")
                        {
                            app.preferred.reset();
                        }
                        else
                        {
                            app.preferred = parse_integer<int>(v);
                        }
                    },
                    [kind](const Scenario &s) {
                        const auto &p = s.sim.apps.at(kind).preferred;
                        return p ? std::to_string(*p) : std::string("none");
                    });
                add(section, "iterations",
                    [kind](Scenario &s, std::string_view v) { s.sim.apps.at(kind).iterations = parse_integer<int>(v); },
                    [kind](const Scenario &s) { return std::to_string(s.sim.apps.at(kind).iterations); });
                add(section, "check_period",
                    [kind](Scenario &s, std::string_view v) { s.sim.apps.at(kind).check_period = parse_optional_time(v); },
                    [kind](const Scenario &s) { return format_optional_time(s.sim.apps.at(kind).check_period); });
            }
            return k;
        }

        const std::vector<Key> &keys()
        {
            static const std::vector<Key> table = build_keys();
            return table;
        }

        const Key *find_key(const std::string &section, const std::string &name)
        {
            for (const Key &k : keys())
            {
                if (section.empty() ? (k.name == name && k.section.rfind("app.", 0) != 0)
                                    : (k.section == section && k.name == name))
                {
                    return &k;
                }
            }
            return nullptr;
        }

        bool known_section(const std::string &section)
        {
            return std::any_of(keys().begin(), keys().end(), [&](const Key &k) { return k.section == section; });
        }

        // "app.Jacobi" and "app.jacobi" name the same section.
        std::string canonical_section(std::string_view raw)
        {
            std::string s = lower(trim(raw));
            return s;
        }

        std::string read_file(const std::string &path)
        {
            std::ifstream in(path, std::ios::binary);
            if (!in)
            {
                throw io_error("cannot read " + path);
            }
            std::ostringstream buf;
            buf << in.rdbuf();
            return buf.str();
        }

        void write_file(const fs::path &path, const std::string &content)
        {
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
            {
                throw io_error("cannot write " + path.string());
            }
            out << content;
            out.flush();
            if (!out)
            {
                throw io_error("failed writing " + path.string());
            }
        }

        void ensure_directory(const std::string &dir)
        {
            std::error_code ec;
            fs::create_directories(dir, ec);
            if (ec || !fs::is_directory(dir))
            {
                throw io_error("cannot create output directory " + dir);
            }
            const fs::path probe = fs::path(dir) / ".write-test";
            {
                std::ofstream out(probe);
                if (!out)
                {
                    throw io_error("output directory " + dir + " is not writable");
                }
            }
            fs::remove(probe, ec);
        }

        std::string audit_text(const simcore::RunResult &r)
        {
            std::ostringstream out;
            out << "events_checked=" << r.audit.events_checked << '\n';
            out << "decisions_checked=" << r.audit.decisions_checked << '\n';
            out << "shrink_decisions=" << r.audit.shrink_decisions << '\n';
            out << "wide_expand_decisions=" << r.audit.wide_expand_decisions << '\n';
            out << "violations=" << r.audit.violations.size() << '\n';
            for (const std::string &v : r.audit.violations)
            {
                out << v << '\n';
            }
            return out.str();
        }

        template <typename Writer>
        std::string render(Writer writer, const metrics::RunSummary &summary)
        {
            std::ostringstream out;
            writer(out, summary);
            return out.str();
        }

        void write_run(const simcore::RunResult &r, const fs::path &dir, const std::string &suffix)
        {
            write_file(dir / ("trace" + suffix + ".txt"), r.trace);
            write_file(dir / ("decisions" + suffix + ".txt"), simcore::format_decision_log(r.summary.actions));
            write_file(dir / ("jobs" + suffix + ".csv"), render(metrics::write_jobs_csv, r.summary));
            write_file(dir / ("timeline" + suffix + ".csv"), render(metrics::write_timeline_csv, r.summary));
            write_file(dir / ("actions" + suffix + ".csv"), render(metrics::write_actions_csv, r.summary));
            write_file(dir / ("audit" + suffix + ".txt"), audit_text(r));
        }
    } // namespace

    void Scenario::validate() const
    {
        if (has_workload && replay)
        {
            throw invalid_argument("jobs and replay are mutually exclusive");
        }
        if (!has_workload && !replay)
        {
            throw invalid_argument("missing required field: jobs (or replay)");
        }
        if (sim.nodes < 1)
        {
            throw invalid_argument("nodes must be at least 1");
        }
        if (sim.policy.expand_timeout <= SimTime::zero())
        {
            throw invalid_argument("expand_timeout must be positive");
        }
        if (sim.policy.inhibitor_period && *sim.policy.inhibitor_period &&
            **sim.policy.inhibitor_period < SimTime::zero())
        {
            throw invalid_argument("inhibitor period must not be negative");
        }
        if (has_workload)
        {
            workload.validate();
        }
        sim.cost.validate();
        for (const AppKind kind : all_apps)
        {
            sim.apps.at(kind).validate();
        }
        if (out_dir.empty())
        {
            throw invalid_argument("out must not be empty");
        }
        if (until && *until <= SimTime::zero())
        {
            throw invalid_argument("until must be positive");
        }
    }

    std::vector<std::uint64_t> Scenario::effective_seeds() const
    {
        if (!seeds.empty())
        {
            return seeds;
        }
        return {workload.seed};
    }

    void set_value(Scenario &scenario, std::string_view key, std::string_view value)
    {
        const std::string k = lower(trim(key));
        std::string section;
        std::string name = k;
        if (const std::size_t dot = k.rfind('.'); dot != std::string::npos)
        {
            section = k.substr(0, dot);
            name = k.substr(dot + 1);
        }
        const Key *entry = find_key(section, name);
        if (!entry)
        {
            throw invalid_argument("unknown key '" + std::string(key) + "'");
        }
        entry->set(scenario, trim(value));
    }

    void set_replay(Scenario &scenario, std::string path)
    {
        scenario.has_workload = false;
        scenario.replay = std::move(path);
    }

    void apply_config(Scenario &scenario, std::string_view text)
    {
        std::string section;
        std::size_t line_no = 0;
        while (!text.empty())
        {
            const std::size_t nl = text.find('\n');
            std::string_view line = text.substr(0, nl);
            text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
            ++line_no;

            if (const std::size_t hash = line.find_first_of("#;"); hash != std::string_view::npos)
            {
                line = line.substr(0, hash);
            }
            line = trim(line);
            if (line.empty())
            {
                continue;
            }
            if (line.front() == '[')
            {
                if (line.back() != ']')
                {
                    throw ParseError(line_no, "malformed section header");
                }
                section = canonical_section(line.substr(1, line.size() - 2));
                if (!known_section(section))
                {
                    throw ParseError(line_no, "unknown section [" + section + "]");
                }
                continue;
            }
            const std::size_t eq = line.find('=');
            if (eq == std::string_view::npos)
            {
                throw ParseError(line_no, "expected key = value");
            }
            const std::string name = lower(trim(line.substr(0, eq)));
            const std::string_view value = trim(line.substr(eq + 1));
            const Key *entry = find_key(section, name);
            if (!entry)
            {
                throw ParseError(line_no, "unknown key '" + name + "'" + (section.empty() ? "" : " in [" + section + "]"));
            }
            try
            {
                entry->set(scenario, value);
            }
            catch (const Error &e)
            {
                throw ParseError(line_no, e.what());
            }
        }
    }

    Scenario parse_config(std::string_view text, bool validate)
    {
        Scenario s;
        apply_config(s, text);
        if (validate)
        {
            s.validate();
        }
        return s;
    }

    Scenario load_config(const std::string &path, bool validate)
    {
        Scenario s;
        apply_config_file(s, path);
        if (validate)
        {
            s.validate();
        }
        return s;
    }

    void apply_config_file(Scenario &scenario, const std::string &path)
    {
        const std::string text = read_file(path);
        try
        {
            apply_config(scenario, text);
        }
        catch (const ParseError &e)
        {
            throw ParseError(0, path + ": " + e.what());
        }
    }

    bool apply_env(Scenario &scenario)
    {
        const char *raw = std::getenv(check_period_env);
        if (!raw || !*raw)
        {
            return false;
        }
        try
        {
            scenario.sim.policy.inhibitor_period = parse_optional_time(trim(raw));
        }
        catch (const Error &)
        {
            throw invalid_argument(std::string(check_period_env) + " must be 'none' or seconds, got '" + raw + "'");
        }
        return true;
    }

    std::string format_config(const Scenario &scenario)
    {
        std::ostringstream out;
        std::string section;
        for (const Key &k : keys())
        {
            if (k.section != section)
            {
                if (!section.empty())
                {
                    out << '\n';
                }
                section = k.section;
                out << '[' << section << "]\n";
            }
            if (const std::optional<std::string> v = k.get(scenario))
            {
                out << k.name << " = " << *v << '\n';
            }
            else
            {
                out << "# " << k.name << " =\n";
            }
        }
        return out.str();
    }

    std::string default_config_text()
    {
        return format_config(Scenario{});
    }

    Scenario load_preset(std::string_view name)
    {
        return parse_config(preset_text(name));
    }

    std::vector<workload::JobDescriptor> materialize(const Scenario &scenario, std::uint64_t seed)
    {
        if (scenario.replay)
        {
            const std::string text = read_file(*scenario.replay);
            try
            {
                return workload::parse_workload(text);
            }
            catch (const Error &e)
            {
                throw ParseError(0, *scenario.replay + ": " + e.what());
            }
        }
        workload::WorkloadParams params = scenario.workload;
        params.seed = seed;
        return workload::generate_workload(params, scenario.sim.apps);
    }

    RunOutputs simulate(const Scenario &scenario, std::uint64_t seed, bool trace)
    {
        scenario.validate();
        const std::vector<workload::JobDescriptor> jobs = materialize(scenario, seed);
        simcore::SimConfig config = scenario.sim;
        config.trace = trace;

        RunOutputs out;
        out.seed = seed;
        out.workload_text = workload::serialize_workload(jobs);
        out.flexible =
            simcore::Simulation(config, jobs, std::string(simcore::to_string(config.policy.mode))).run(scenario.until);
        if (scenario.paired)
        {
            out.fixed = simcore::Simulation(config, workload::as_fixed(jobs), "fixed").run(scenario.until);
            out.gains = metrics::gain_report(out.fixed->summary, out.flexible.summary);
        }
        return out;
    }

    std::string summary_csv(const RunOutputs &outputs)
    {
        std::ostringstream out;
        metrics::write_summary_header(out);
        metrics::write_summary_rows(out, outputs.flexible.summary);
        if (outputs.fixed)
        {
            metrics::write_summary_rows(out, outputs.fixed->summary);
        }
        if (outputs.gains)
        {
            metrics::write_gain_rows(out, *outputs.gains);
        }
        return out.str();
    }

    std::map<std::string, std::map<std::string, std::string>> summary_table(const RunOutputs &outputs)
    {
        std::map<std::string, std::map<std::string, std::string>> table;
        std::istringstream in(summary_csv(outputs));
        std::string line;
        std::getline(in, line); // header
        while (std::getline(in, line))
        {
            const std::size_t a = line.find(',');
            const std::size_t b = line.find(',', a + 1);
            if (a == std::string::npos || b == std::string::npos)
            {
                continue;
            }
            table[line.substr(0, a)][line.substr(a + 1, b - a - 1)] = line.substr(b + 1);
        }
        return table;
    }

    void write_outputs(const RunOutputs &outputs, const std::string &dir)
    {
        ensure_directory(dir);
        const fs::path base(dir);
        write_file(base / "workload.txt", outputs.workload_text);
        write_file(base / "summary.csv", summary_csv(outputs));
        write_run(outputs.flexible, base, "");
        if (outputs.fixed)
        {
            write_run(*outputs.fixed, base, "_fixed");
        }
        if (outputs.gains)
        {
            std::ostringstream diff;
            diff << "job,wait,exec,completion\n";
            char buf[160];
            for (const metrics::PairedDifference &d : outputs.gains->per_job)
            {
                std::snprintf(buf, sizeof buf, "%u,%.6f,%.6f,%.6f\n", d.job, d.wait, d.exec, d.completion);
                diff << buf;
            }
            write_file(base / "paired_diff.csv", diff.str());
        }
    }

    std::vector<RunOutputs> run_scenario(const Scenario &scenario)
    {
        scenario.validate();
        ensure_directory(scenario.out_dir);
        const std::vector<std::uint64_t> seeds = scenario.effective_seeds();
        const bool sweep = seeds.size() > 1;

        std::vector<RunOutputs> results(seeds.size());
        std::vector<std::exception_ptr> errors(seeds.size());
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (std::size_t i = next++; i < seeds.size(); i = next++)
            {
                try
                {
                    results[i] = simulate(scenario, seeds[i]);
                    const std::string dir =
                        sweep ? (fs::path(scenario.out_dir) / ("seed-" + std::to_string(seeds[i]))).string()
                              : scenario.out_dir;
                    write_outputs(results[i], dir);
                    // Traces are on disk; keep memory flat across large sweeps.
                    results[i].flexible.trace.clear();
                    if (results[i].fixed)
                    {
                        results[i].fixed->trace.clear();
                    }
                }
                catch (...)
                {
                    errors[i] = std::current_exception();
                }
            }
        };

        const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
        const std::size_t n_threads = std::min(hw, seeds.size());
        if (n_threads <= 1)
        {
            worker();
        }
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t t = 0; t < n_threads; ++t)
            {
                pool.emplace_back(worker);
            }
            for (std::thread &t : pool)
            {
                t.join();
            }
        }
        for (const std::exception_ptr &e : errors)
        {
            if (e)
            {
                std::rethrow_exception(e);
            }
        }

        if (sweep)
        {
            std::ostringstream all;
            all << "seed,run,metric,value\n";
            for (const RunOutputs &r : results)
            {
                std::istringstream rows(summary_csv(r));
                std::string line;
                std::getline(rows, line);
                while (std::getline(rows, line))
                {
                    all << r.seed << ',' << line << '\n';
                }
            }
            write_file(fs::path(scenario.out_dir) / "sweep.csv", all.str());
        }
        return results;
    }

    std::string report(const Scenario &scenario, const std::vector<RunOutputs> &runs)
    {
        std::ostringstream out;
        char buf[256];
        auto line = [&](std::uint64_t seed, const simcore::RunResult &r) {
            const metrics::RunSummary &s = r.summary;
            std::snprintf(buf, sizeof buf,
                          "seed %llu %-6s makespan=%.3f util=%.2f%% wait=%.3f exec=%.3f completion=%.3f "
                          "completed=%zu audit=%s\n",
                          static_cast<unsigned long long>(seed), s.label.c_str(), s.makespan.seconds(),
                          s.utilization ? s.utilization->avg : 0.0, s.mean_wait, s.mean_exec, s.mean_completion,
                          s.jobs_completed, r.audit.ok() ? "ok" : "VIOLATIONS");
            out << buf;
        };
        out << scenario.name << " -> " << scenario.out_dir << '\n';
        for (const RunOutputs &r : runs)
        {
            line(r.seed, r.flexible);
            if (r.fixed)
            {
                line(r.seed, *r.fixed);
            }
            if (r.gains)
            {
                std::snprintf(buf, sizeof buf,
                              "seed %llu gain   makespan=%.2f%% wait=%.2f%% exec=%.2f%% completion=%.2f%%\n",
                              static_cast<unsigned long long>(r.seed), r.gains->makespan, r.gains->wait,
                              r.gains->exec, r.gains->completion);
                out << buf;
            }
        }
        return out.str();
    }
} // namespace dmrsim::scenario
