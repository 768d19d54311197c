#include "dmrsim/sim_time.hpp"

#include "dmrsim/error.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace dmrsim
{
    SimTime SimTime::from_seconds(double s)
    {
        if (!std::isfinite(s))
        {
            throw domain_error("non-finite time value");
        }
        const double us = std::round(s * 1e6);
        if (std::fabs(us) > 9.0e18)
        {
            throw domain_error("time value out of range");
        }
        return SimTime(static_cast<std::int64_t>(us));
    }

    SimTime SimTime::parse(std::string_view text)
    {
        if (text.empty())
        {
            throw invalid_argument("empty time value");
        }
        bool negative = false;
        std::size_t i = 0;
        if (text[0] == '-' || text[0] == '+')
        {
            negative = text[0] == '-';
            ++i;
        }
        std::int64_t whole = 0;
        std::int64_t frac = 0;
        int frac_digits = 0;
        bool any_digit = false;
        bool in_frac = false;
        constexpr std::int64_t limit = std::numeric_limits<std::int64_t>::max() / 10'000'000;
        for (; i < text.size(); ++i)
        {
            const char c = text[i];
            if (c == '.')
            {
                if (in_frac)
                {
                    throw invalid_argument("malformed time value '" + std::string(text) + "'");
                }
                in_frac = true;
                continue;
            }
            if (c < '0' || c > '9')
            {
                throw invalid_argument("malformed time value '" + std::string(text) + "'");
            }
            any_digit = true;
            if (in_frac)
            {
                if (++frac_digits > 6)
                {
                    throw invalid_argument("time value '" + std::string(text) + "' has sub-microsecond precision");
                }
                frac = frac * 10 + (c - '0');
            }
            else
            {
                if (whole > limit)
                {
                    throw invalid_argument("time value '" + std::string(text) + "' out of range");
                }
                whole = whole * 10 + (c - '0');
            }
        }
        if (!any_digit)
        {
            throw invalid_argument("malformed time value '" + std::string(text) + "'");
        }
        for (; frac_digits < 6; ++frac_digits)
        {
            frac *= 10;
        }
        const std::int64_t us = whole * 1'000'000 + frac;
        return SimTime(negative ? -us : us);
    }

    std::string SimTime::to_string() const
    {
        const bool negative = m_us < 0;
        const std::uint64_t mag = negative ? static_cast<std::uint64_t>(-(m_us + 1)) + 1 : static_cast<std::uint64_t>(m_us);
        char buf[40];
        std::snprintf(buf, sizeof buf, "%s%llu.%06llu", negative ? "-" : "",
                      static_cast<unsigned long long>(mag / 1'000'000),
                      static_cast<unsigned long long>(mag % 1'000'000));
        return buf;
    }
} // namespace dmrsim
