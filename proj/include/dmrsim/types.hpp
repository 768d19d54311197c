#pragma once

#include <cstdint>
#include <optional>
#include <string_view>

namespace dmrsim
{
    using JobId = std::uint32_t;

    enum class AppKind : std::uint8_t
    {
        FS,
        CG,
        Jacobi,
        Nbody,
    };

    std::string_view to_string(AppKind app) noexcept;
    std::optional<AppKind> parse_app_kind(std::string_view name) noexcept;

    /// Arguments a flexible job hands to the resource manager at a check.
    struct DmrRequest
    {
        int min_procs = 1;
        int max_procs = 1;
        int factor = 2;
        std::optional<int> preferred;

        /// Throws ErrorCode::InvalidArgument when min > max, factor < 2 or
        /// preferred lies outside [min, max].
        void validate() const;
    };

    enum class ActionKind : std::uint8_t
    {
        None,
        Expand,
        Shrink,
    };

    enum class Reason : std::uint8_t
    {
        RequestedAction,
        PreferredMatch,
        WideOptExpand,
        WideOptShrink,
        NoChange,
    };

    std::string_view to_string(ActionKind kind) noexcept;
    std::string_view to_string(Reason reason) noexcept;

    struct Action
    {
        ActionKind kind = ActionKind::None;
        int target = 0; // 0 for None
        Reason reason = Reason::NoChange;
        std::optional<JobId> boosted; // queued job lifted to maximum priority by a shrink

        static Action none(Reason why = Reason::NoChange) { return Action{ActionKind::None, 0, why, std::nullopt}; }
        static Action expand(int target, Reason why) { return Action{ActionKind::Expand, target, why, std::nullopt}; }
        static Action shrink(int target, Reason why, std::optional<JobId> boosted = std::nullopt)
        {
            return Action{ActionKind::Shrink, target, why, boosted};
        }

        bool operator==(const Action &) const = default;
    };
} // namespace dmrsim
