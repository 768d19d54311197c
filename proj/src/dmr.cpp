#include "dmrsim/dmr.hpp"

#include "dmrsim/error.hpp"

#include <sstream>

namespace dmrsim::dmr
{
    bool CheckGate::pass(SimTime now)
    {
        if (m_period && now - m_last_forwarded < *m_period)
        {
            return false;
        }
        m_last_forwarded = now;
        return true;
    }

    bool inhibitor_gate(CheckGate &gate, SimTime now)
    {
        return gate.pass(now);
    }

    int nodes_involved(const Action &action, int current)
    {
        return action.kind == ActionKind::Expand ? action.target : current;
    }

    namespace
    {
        void require_flexible(const JobCheckState &state)
        {
            if (!state.flexible)
            {
                throw contract_error("job " + std::to_string(state.job) + " is not flexible and cannot check");
            }
        }
    } // namespace

    CheckOutcome check_status(JobCheckState &state, const DmrRequest &request, SimTime now,
                              rms::ResourceManager &manager, const appmodel::CostModelParams &cost,
                              const rms::PolicyToggles &toggles)
    {
        require_flexible(state);
        request.validate();
        if (!state.gate.pass(now))
        {
            return CheckOutcome{false, Action::none(), SimTime::zero()};
        }
        const int current = manager.allocation(state.job);
        const Action action = manager.decide(state.job, request, toggles);
        return CheckOutcome{true, action, appmodel::scheduling_overhead(nodes_involved(action, current), cost)};
    }

    std::optional<CheckOutcome> icheck_status(JobCheckState &state, const DmrRequest &request, SimTime now,
                                              rms::ResourceManager &manager, const appmodel::CostModelParams &cost,
                                              const rms::PolicyToggles &toggles)
    {
        require_flexible(state);
        request.validate();
        if (state.pending || !state.gate.pass(now))
        {
            return std::nullopt;
        }
        const int current = manager.allocation(state.job);
        const Action action = manager.decide(state.job, request, toggles);
        state.pending = PendingAction{action, state.step, now};
        return CheckOutcome{true, action, appmodel::scheduling_overhead(nodes_involved(action, current), cost)};
    }

    std::optional<PendingAction> take_pending(JobCheckState &state)
    {
        std::optional<PendingAction> out = std::move(state.pending);
        state.pending.reset();
        return out;
    }

    std::string_view to_string(Direction d) noexcept
    {
        switch (d)
        {
        case Direction::Identity:
            return "identity";
        case Direction::Expand:
            return "expand";
        case Direction::Shrink:
            return "shrink";
        }
        return "?";
    }

    ByteRange block_range(std::uint64_t volume, int world, int rank)
    {
        if (world < 1 || rank < 0 || rank >= world)
        {
            throw domain_error("block_range: rank outside world");
        }
        __extension__ using u128 = unsigned __int128;
        const auto lo = static_cast<std::uint64_t>(u128(volume) * u128(rank) / u128(world));
        const auto hi = static_cast<std::uint64_t>(u128(volume) * u128(rank + 1) / u128(world));
        return ByteRange{lo, hi - lo};
    }

    namespace
    {
        // Merge touching ranges and drop empty ones.
        std::vector<ByteRange> normalize(const std::vector<ByteRange> &ranges)
        {
            std::vector<ByteRange> out;
            for (const ByteRange &r : ranges)
            {
                if (r.length == 0)
                {
                    continue;
                }
                if (!out.empty() && out.back().offset + out.back().length == r.offset)
                {
                    out.back().length += r.length;
                }
                else
                {
                    out.push_back(r);
                }
            }
            return out;
        }

        RedistributionPlan identity_plan(int world, std::uint64_t volume)
        {
            RedistributionPlan plan;
            plan.old_world = world;
            plan.new_world = world;
            plan.factor = 1;
            plan.direction = Direction::Identity;
            plan.rank_map.resize(world);
            plan.ownership.resize(world);
            for (int r = 0; r < world; ++r)
            {
                plan.rank_map[r] = {r};
                plan.ownership[r] = normalize({block_range(volume, world, r)});
            }
            return plan;
        }
    } // namespace

    RedistributionPlan plan_expand(int old_world, int factor, std::uint64_t volume)
    {
        if (old_world < 1 || factor < 1)
        {
            throw domain_error("plan_expand needs old_world >= 1 and factor >= 1");
        }
        if (factor == 1)
        {
            return identity_plan(old_world, volume);
        }
        RedistributionPlan plan;
        plan.old_world = old_world;
        plan.new_world = old_world * factor;
        plan.factor = factor;
        plan.direction = Direction::Expand;
        plan.rank_map.resize(plan.new_world);
        plan.ownership.resize(plan.new_world);
        for (int rank = 0; rank < old_world; ++rank)
        {
            // The new world's blocks nest inside the old ones.
            for (int i = 0; i < factor; ++i)
            {
                const int dest = rank * factor + i;
                const ByteRange part = block_range(volume, plan.new_world, dest);
                plan.transfers.push_back(Transfer{rank, dest, part.length, part});
                plan.rank_map[dest] = {rank};
                plan.ownership[dest] = normalize({part});
            }
        }
        return plan;
    }

    RedistributionPlan plan_shrink(int old_world, int factor, std::uint64_t volume)
    {
        if (old_world < 1 || factor < 1)
        {
            throw domain_error("plan_shrink needs old_world >= 1 and factor >= 1");
        }
        if (old_world % factor != 0)
        {
            throw domain_error("plan_shrink: " + std::to_string(old_world) + " processes are not divisible by factor " +
                               std::to_string(factor));
        }
        if (factor == 1)
        {
            return identity_plan(old_world, volume);
        }
        RedistributionPlan plan;
        plan.old_world = old_world;
        plan.new_world = old_world / factor;
        plan.factor = factor;
        plan.direction = Direction::Shrink;
        plan.rank_map.resize(plan.new_world);
        plan.ownership.resize(plan.new_world);
        for (int rank = 0; rank < old_world; ++rank)
        {
            const bool sender = rank % factor != factor - 1;
            if (sender)
            {
                const int dst = factor * (rank / factor + 1) - 1;
                const ByteRange block = block_range(volume, old_world, rank);
                plan.transfers.push_back(Transfer{rank, dst, block.length, block});
                continue;
            }
            const int dest = rank / factor;
            std::vector<ByteRange> gathered;
            for (int i = 1; i <= factor; ++i)
            {
                const int src = rank - factor + i;
                plan.rank_map[dest].push_back(src);
                gathered.push_back(block_range(volume, old_world, src));
            }
            plan.ownership[dest] = normalize(gathered);
        }
        return plan;
    }

    RedistributionPlan plan_resize(int old_world, int new_world, std::uint64_t volume)
    {
        if (old_world < 1 || new_world < 1)
        {
            throw domain_error("plan_resize needs positive world sizes");
        }
        if (new_world >= old_world && new_world % old_world == 0)
        {
            return plan_expand(old_world, new_world / old_world, volume);
        }
        if (new_world < old_world && old_world % new_world == 0)
        {
            return plan_shrink(old_world, old_world / new_world, volume);
        }
        throw domain_error("plan_resize: " + std::to_string(old_world) + " -> " + std::to_string(new_world) +
                           " is not a homogeneous resize");
    }

    std::string RedistributionPlan::to_string() const
    {
        std::ostringstream out;
        out << "plan " << dmr::to_string(direction) << " old=" << old_world << " new=" << new_world
            << " factor=" << factor << '\n';
        for (const Transfer &t : transfers)
        {
            out << "  send " << t.src_old_rank << "->" << t.dst_rank << ' ' << t.bytes << " [" << t.range.offset << ','
                << t.range.offset + t.range.length << ")\n";
        }
        for (std::size_t n = 0; n < rank_map.size(); ++n)
        {
            out << "  new " << n << " <-";
            for (const int r : rank_map[n])
            {
                out << ' ' << r;
            }
            out << '\n';
        }
        return out.str();
    }
} // namespace dmrsim::dmr
