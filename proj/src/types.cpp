#include "dmrsim/types.hpp"

#include "dmrsim/error.hpp"

#include <string>

namespace dmrsim
{
    std::string_view to_string(AppKind app) noexcept
    {
        switch (app)
        {
        case AppKind::FS:
            return "FS";
        case AppKind::CG:
            return "CG";
        case AppKind::Jacobi:
            return "Jacobi";
        case AppKind::Nbody:
            return "Nbody";
        }
        return "?";
    }

    std::optional<AppKind> parse_app_kind(std::string_view name) noexcept
    {
        auto eq = [&](std::string_view ref) {
            if (name.size() != ref.size())
            {
                return false;
            }
            for (std::size_t i = 0; i < name.size(); ++i)
            {
                const char a = name[i] >= 'A' && name[i] <= 'Z' ? static_cast<char>(name[i] - 'A' + 'a') : name[i];
                const char b = ref[i] >= 'A' && ref[i] <= 'Z' ? static_cast<char>(ref[i] - 'A' + 'a') : ref[i];
                if (a != b)
                {
                    return false;
                }
            }
            return true;
        };
        if (eq("fs"))
            return AppKind::FS;
        if (eq("cg"))
            return AppKind::CG;
        if (eq("jacobi"))
            return AppKind::Jacobi;
        if (eq("nbody") || eq("n-body"))
            return AppKind::Nbody;
        return std::nullopt;
    }

    void DmrRequest::validate() const
    {
        if (min_procs < 1)
        {
            throw invalid_argument("request minimum must be at least 1");
        }
        if (min_procs > max_procs)
        {
            throw invalid_argument("inconsistent request: min " + std::to_string(min_procs) + " > max " +
                                   std::to_string(max_procs));
        }
        if (factor < 2)
        {
            throw invalid_argument("resizing factor must be at least 2");
        }
        if (preferred && (*preferred < min_procs || *preferred > max_procs))
        {
            throw invalid_argument("preferred " + std::to_string(*preferred) + " outside [min, max]");
        }
    }

    std::string_view to_string(ActionKind kind) noexcept
    {
        switch (kind)
        {
        case ActionKind::None:
            return "none";
        case ActionKind::Expand:
            return "expand";
        case ActionKind::Shrink:
            return "shrink";
        }
        return "?";
    }

    std::string_view to_string(Reason reason) noexcept
    {
        switch (reason)
        {
        case Reason::RequestedAction:
            return "RequestedAction";
        case Reason::PreferredMatch:
            return "PreferredMatch";
        case Reason::WideOptExpand:
            return "WideOptExpand";
        case Reason::WideOptShrink:
            return "WideOptShrink";
        case Reason::NoChange:
            return "NoChange";
        }
        return "?";
    }
} // namespace dmrsim
