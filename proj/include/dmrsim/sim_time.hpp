#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace dmrsim
{
    /// Simulated time as a signed count of microseconds. Used for both instants
    /// and durations; integer arithmetic keeps event ordering identical on every
    /// platform.
    class SimTime
    {
    public:
        constexpr SimTime() noexcept = default;

        static constexpr SimTime from_micros(std::int64_t us) noexcept { return SimTime(us); }

        /// Rounds to the nearest microsecond.
        static SimTime from_seconds(double seconds);

        /// Exact decimal parse ("12", "12.5", "0.000001"); at most 6 fractional digits.
        static SimTime parse(std::string_view text);

        static constexpr SimTime zero() noexcept { return SimTime(0); }
        static constexpr SimTime max() noexcept { return SimTime(INT64_MAX); }

        constexpr std::int64_t micros() const noexcept { return m_us; }
        constexpr double seconds() const noexcept { return static_cast<double>(m_us) / 1e6; }

        /// Fixed six-decimal rendering; round-trips through parse().
        std::string to_string() const;

        constexpr SimTime operator+(SimTime o) const noexcept { return SimTime(m_us + o.m_us); }
        constexpr SimTime operator-(SimTime o) const noexcept { return SimTime(m_us - o.m_us); }
        constexpr SimTime operator*(std::int64_t k) const noexcept { return SimTime(m_us * k); }
        constexpr SimTime &operator+=(SimTime o) noexcept
        {
            m_us += o.m_us;
            return *this;
        }
        constexpr SimTime &operator-=(SimTime o) noexcept
        {
            m_us -= o.m_us;
            return *this;
        }

        constexpr auto operator<=>(const SimTime &) const noexcept = default;

    private:
        constexpr explicit SimTime(std::int64_t us) noexcept : m_us(us) {}

        std::int64_t m_us = 0;
    };

    inline SimTime seconds(double s) { return SimTime::from_seconds(s); }
} // namespace dmrsim
