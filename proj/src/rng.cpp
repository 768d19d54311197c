#include "dmrsim/rng.hpp"

#include <cmath>

namespace dmrsim
{
    std::uint64_t splitmix64(std::uint64_t x) noexcept
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    RngStream RngStream::derive(std::uint64_t seed, std::string_view purpose)
    {
        // FNV-1a over the purpose name.
        std::uint64_t h = 0xCBF29CE484222325ull;
        for (const char c : purpose)
        {
            h ^= static_cast<unsigned char>(c);
            h *= 0x100000001B3ull;
        }
        return RngStream(splitmix64(splitmix64(seed) ^ h));
    }

    double RngStream::uniform()
    {
        return static_cast<double>(m_engine() >> 11) * 0x1.0p-53;
    }

    double RngStream::exponential(double mean)
    {
        // 1 - u lies in (0, 1], so the log is finite.
        return -mean * std::log(1.0 - uniform());
    }

    bool RngStream::bernoulli(double p)
    {
        // Always consumes one draw, so streams stay aligned across different p
        // and the accepted sets are nested as p grows.
        return uniform() < p;
    }
} // namespace dmrsim
