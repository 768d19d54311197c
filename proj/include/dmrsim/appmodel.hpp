#pragma once

#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace dmrsim::appmodel
{
    /// Performance model of one application.
    ///
    /// Speedup follows Amdahl's law with parallel fraction `parallel_fraction`:
    /// speedup(p) = 1 / ((1 - f) + f / p). f = 1 gives exact linear scaling.
    struct AppModel
    {
        AppKind kind = AppKind::FS;
        double parallel_fraction = 1.0;
        int min_procs = 1;
        int max_procs = 1;
        std::optional<int> preferred;
        int iterations = 1;
        std::optional<SimTime> check_period; // inhibitor period, none when absent

        double speedup(int procs) const;

        void validate() const;
    };

    /// Built-in parameters for FS, CG, Jacobi and N-body.
    AppModel default_app(AppKind kind);

    class AppCatalog
    {
    public:
        AppCatalog();

        const AppModel &at(AppKind kind) const { return m_apps[static_cast<std::size_t>(kind)]; }
        AppModel &at(AppKind kind) { return m_apps[static_cast<std::size_t>(kind)]; }

    private:
        std::array<AppModel, 4> m_apps;
    };

    /// Per-step time at `procs` for a job whose step takes `base_step_time` at
    /// `initial_size`: base * speedup(initial) / speedup(procs).
    /// Throws ErrorCode::Domain when procs is outside [min_procs, max_procs].
    SimTime step_time(const AppModel &app, SimTime base_step_time, int initial_size, int procs);

    struct CostModelParams
    {
        double bandwidth = 2.5e9;              // bytes/s per transferring process pair
        double shrink_sync_base = 0.2;         // s
        double shrink_sync_per_ratio = 1e-4;   // s per unit of p_old / p_new
        double sched_base = 0.008;             // s
        double sched_per_node = 0.0001;        // s per node involved

        void validate() const;
    };

    /// Data redistribution plus (for shrinks) the ACK synchronisation.
    SimTime resize_cost(std::uint64_t volume, int p_old, int p_new, const CostModelParams &params);

    /// The synchronisation part of a shrink alone; zero for expansions.
    double shrink_sync_seconds(int p_old, int p_new, const CostModelParams &params);

    /// Time for the resource manager to reach a decision.
    SimTime scheduling_overhead(int p_involved, const CostModelParams &params);
} // namespace dmrsim::appmodel
