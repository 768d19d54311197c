#include "dmrsim/appmodel.hpp"

#include "dmrsim/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dmrsim::appmodel
{
    double AppModel::speedup(int procs) const
    {
        if (procs < 1)
        {
            throw domain_error("speedup needs at least one process");
        }
        if (parallel_fraction == 1.0)
        {
            return static_cast<double>(procs);
        }
        return 1.0 / ((1.0 - parallel_fraction) + parallel_fraction / procs);
    }

    void AppModel::validate() const
    {
        if (!(parallel_fraction >= 0.0 && parallel_fraction <= 1.0))
        {
            throw invalid_argument(std::string(to_string(kind)) + ": parallel fraction must lie in [0, 1]");
        }
        if (min_procs < 1 || min_procs > max_procs)
        {
            throw invalid_argument(std::string(to_string(kind)) + ": need 1 <= min_procs <= max_procs");
        }
        if (preferred && (*preferred < min_procs || *preferred > max_procs))
        {
            throw invalid_argument(std::string(to_string(kind)) + ": preferred outside [min_procs, max_procs]");
        }
        if (iterations < 1)
        {
            throw invalid_argument(std::string(to_string(kind)) + ": iterations must be positive");
        }
        if (check_period && *check_period < SimTime::zero())
        {
            throw invalid_argument(std::string(to_string(kind)) + ": negative scheduling period");
        }
    }

    AppModel default_app(AppKind kind)
    {
        AppModel app;
        app.kind = kind;
        switch (kind)
        {
        case AppKind::FS:
            app.parallel_fraction = 1.0;
            app.min_procs = 1;
            app.max_procs = 20;
            app.iterations = 25;
            break;
        case AppKind::CG:
        case AppKind::Jacobi:
            // Largest parallel fraction keeping speedup(32) / speedup(8) under 1.10.
            app.parallel_fraction = 0.5;
            app.min_procs = 2;
            app.max_procs = 32;
            app.preferred = 8;
            app.iterations = 10000;
            app.check_period = SimTime::from_micros(15'000'000);
            break;
        case AppKind::Nbody:
            app.parallel_fraction = 0.08;
            app.min_procs = 1;
            app.max_procs = 16;
            app.preferred = 1;
            app.iterations = 25;
            break;
        }
        return app;
    }

    AppCatalog::AppCatalog()
        : m_apps{default_app(AppKind::FS), default_app(AppKind::CG), default_app(AppKind::Jacobi),
                 default_app(AppKind::Nbody)}
    {
    }

    SimTime step_time(const AppModel &app, SimTime base_step_time, int initial_size, int procs)
    {
        if (procs < app.min_procs || procs > app.max_procs)
        {
            throw domain_error(std::string(to_string(app.kind)) + ": " + std::to_string(procs) +
                               " processes outside [" + std::to_string(app.min_procs) + ", " +
                               std::to_string(app.max_procs) + "]");
        }
        if (procs == initial_size)
        {
            return base_step_time;
        }
        const double scaled =
            static_cast<double>(base_step_time.micros()) * app.speedup(initial_size) / app.speedup(procs);
        return SimTime::from_micros(std::max<std::int64_t>(1, std::llround(scaled)));
    }

    void CostModelParams::validate() const
    {
        if (!(bandwidth > 0.0))
        {
            throw invalid_argument("bandwidth must be positive");
        }
        if (shrink_sync_base < 0.0 || shrink_sync_per_ratio < 0.0 || sched_base < 0.0 || sched_per_node < 0.0)
        {
            throw invalid_argument("cost model parameters must be non-negative");
        }
    }

    double shrink_sync_seconds(int p_old, int p_new, const CostModelParams &params)
    {
        if (p_new >= p_old)
        {
            return 0.0;
        }
        return params.shrink_sync_base +
               params.shrink_sync_per_ratio * (static_cast<double>(p_old) / static_cast<double>(p_new));
    }

    SimTime resize_cost(std::uint64_t volume, int p_old, int p_new, const CostModelParams &params)
    {
        if (p_old < 1 || p_new < 1)
        {
            throw domain_error("resize needs at least one process on each side");
        }
        const double pairs = static_cast<double>(std::min(p_old, p_new));
        const double transfer = static_cast<double>(volume) / (pairs * params.bandwidth);
        return SimTime::from_seconds(transfer + shrink_sync_seconds(p_old, p_new, params));
    }

    SimTime scheduling_overhead(int p_involved, const CostModelParams &params)
    {
        if (p_involved < 0)
        {
            throw domain_error("negative node count");
        }
        return SimTime::from_seconds(params.sched_base + params.sched_per_node * p_involved);
    }
} // namespace dmrsim::appmodel
