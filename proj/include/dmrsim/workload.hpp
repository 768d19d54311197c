#pragma once

#include "dmrsim/appmodel.hpp"
#include "dmrsim/rng.hpp"
#include "dmrsim/sim_time.hpp"
#include "dmrsim/types.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dmrsim::workload
{
    struct WorkloadParams
    {
        std::uint32_t jobs = 0;
        int max_job_size = 20;
        double mean_interarrival = 10.0; // s
        double max_step_runtime = 60.0;  // s, clamp on sampled step times
        std::optional<int> iterations;   // overrides every app's default when set
        double flexible_ratio = 1.0;
        std::array<double, 4> app_mix{1.0, 0.0, 0.0, 0.0}; // FS, CG, Jacobi, Nbody
        std::uint64_t seed = 1;
        int factor = 2;
        std::uint64_t data_volume = 1ull << 30; // bytes moved per reconfiguration

        // Job size: log2-uniform, then snapped to a power of two with this probability.
        double pow2_snap_prob = 0.3;

        // Two-branch hyperexponential step runtime. The short-branch mean grows
        // linearly from runtime_mean_small (size 1) to runtime_mean_large
        // (max_job_size); the long branch has runtime_branch_ratio times that mean.
        double runtime_mean_small = 5.0;
        double runtime_mean_large = 15.0;
        double runtime_branch_prob = 0.7;
        double runtime_branch_ratio = 4.0;

        void validate() const;
    };

    struct JobDescriptor
    {
        JobId id = 0;
        SimTime arrival;
        int initial_size = 1;
        int min_procs = 1;
        int max_procs = 1;
        std::optional<int> preferred_procs;
        int factor = 2;
        bool flexible = false;
        AppKind app = AppKind::FS;
        int iterations = 1;
        SimTime base_step_time; // per-step time at initial_size
        std::uint64_t data_volume = 0;

        DmrRequest request() const { return DmrRequest{min_procs, max_procs, factor, preferred_procs}; }

        void validate() const;

        bool operator==(const JobDescriptor &) const = default;
    };

    /// Integer in [1, max_job_size].
    int sample_job_size(RngStream &rng, int max_job_size, double pow2_snap_prob);

    /// Positive step runtime for a job of `size` nodes, clamped to params.max_step_runtime.
    SimTime sample_step_runtime(int size, RngStream &rng, const WorkloadParams &params);

    /// Deterministic under params.seed. Uses independent substreams for
    /// arrivals, sizes, runtimes, app choice and flexibility tagging.
    std::vector<JobDescriptor> generate_workload(const WorkloadParams &params,
                                                 const appmodel::AppCatalog &apps = appmodel::AppCatalog());

    /// Line-oriented replay format, one job per line, '#' comments.
    std::string serialize_workload(std::span<const JobDescriptor> jobs);
    std::vector<JobDescriptor> parse_workload(std::string_view text);

    /// Same jobs with every flexible flag cleared.
    std::vector<JobDescriptor> as_fixed(std::span<const JobDescriptor> jobs);

    /// Hash over everything except the flexible flags; paired runs must agree on it.
    std::uint64_t fingerprint(std::span<const JobDescriptor> jobs);
} // namespace dmrsim::workload
