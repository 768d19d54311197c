#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dmrsim
{
    /// Seedable random stream with platform-independent output.
    ///
    /// Wraps std::mt19937_64, whose sequence is fixed by the standard, and does
    /// its own variate transforms because the <random> distributions are
    /// implementation-defined.
    class RngStream
    {
    public:
        explicit RngStream(std::uint64_t seed) : m_engine(seed) {}

        /// Independent substream for one purpose ("arrivals", "sizes", ...).
        /// Adding a new purpose never perturbs the existing ones.
        static RngStream derive(std::uint64_t seed, std::string_view purpose);

        std::uint64_t next_u64() { return m_engine(); }

        /// Uniform in [0, 1) with 53 random bits.
        double uniform();

        /// Exponential with the given mean.
        double exponential(double mean);

        bool bernoulli(double p);

    private:
        std::mt19937_64 m_engine;
    };

    std::uint64_t splitmix64(std::uint64_t x) noexcept;
} // namespace dmrsim
