#pragma once

#include <stdexcept>
#include <string>

namespace dmrsim
{
    enum class ErrorCode
    {
        InvalidArgument,
        Domain,
        Causality,
        Contract,
        Parse,
        Io,
    };

    /// Base exception for every failure raised by the simulator core. The C API
    /// maps `code()` onto its status values.
    class Error : public std::runtime_error
    {
    public:
        Error(ErrorCode code, const std::string &what) : std::runtime_error(what), m_code(code) {}

        ErrorCode code() const noexcept { return m_code; }

    private:
        ErrorCode m_code;
    };

    inline Error invalid_argument(const std::string &what) { return Error(ErrorCode::InvalidArgument, what); }
    inline Error domain_error(const std::string &what) { return Error(ErrorCode::Domain, what); }
    inline Error contract_error(const std::string &what) { return Error(ErrorCode::Contract, what); }
    inline Error io_error(const std::string &what) { return Error(ErrorCode::Io, what); }

    /// Parse failure carrying the 1-based line it refers to (0 when unknown).
    class ParseError : public Error
    {
    public:
        ParseError(std::size_t line, const std::string &message)
            : Error(ErrorCode::Parse, line == 0 ? message : "line " + std::to_string(line) + ": " + message),
              m_line(line)
        {
        }

        std::size_t line() const noexcept { return m_line; }

    private:
        std::size_t m_line;
    };
} // namespace dmrsim
