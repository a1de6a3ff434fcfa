#pragma once

// Per-node source-routing state and the decision made at each protocol step.
// The simulation owns timing and transmission; everything here decides.

#include "manet/packets.hpp"
#include "manet/qos.hpp"
#include "manet/trace.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

namespace manet
{
    struct RoutingParams
    {
        double reply_window = 0.5;   // s the origin collects replies for
        double cache_lifetime = 5.0; // s before a cached route goes stale
        std::size_t send_buffer = 64; // packets held per destination during discovery
    };

    struct RouteCacheEntry
    {
        std::vector<NodeId> route; // self ... destination
        double score = 0.0;        // hop count (DSR) or policy cost
        CostBreakdown breakdown;
        SimTime inserted_at;
    };

    inline bool route_uses_link(std::span<const NodeId> route, NodeId a, NodeId b)
    {
        for (std::size_t i = 0; i + 1 < route.size(); ++i)
        {
            if (route[i] == a && route[i + 1] == b)
            {
                return true;
            }
        }
        return false;
    }

    class RouteCache
    {
    public:
        explicit RouteCache(SimTime lifetime = SimTime::from_seconds(5.0)) : lifetime_(lifetime) {}

        /// Entry for dst if it was inserted less than one lifetime ago.
        const RouteCacheEntry *fresh(NodeId dst, SimTime now) const
        {
            auto it = entries_.find(dst);
            if (it == entries_.end() || now - it->second.inserted_at >= lifetime_)
            {
                return nullptr;
            }
            return &it->second;
        }

        void insert(NodeId dst, RouteCacheEntry e) { entries_[dst] = std::move(e); }

        /// Drops every cached route that traverses a → b. Returns how many.
        std::size_t purge_link(NodeId a, NodeId b)
        {
            return std::erase_if(entries_, [&](const auto &kv) { return route_uses_link(kv.second.route, a, b); });
        }

        std::size_t size() const noexcept { return entries_.size(); }

    private:
        SimTime lifetime_;
        std::map<NodeId, RouteCacheEntry> entries_;
    };

    // ---------------------------------------------------------------------
    // Route request

    enum class RreqAction : std::uint8_t
    {
        Rebroadcast,
        Reply,
        Drop,
    };

    /// The target answers every copy that reaches it (each copy carries a
    /// distinct path); any other node forwards a request at most once.
    /// On Rebroadcast the request has been extended with `self`.
    inline RreqAction handle_rreq(NodeId self, std::set<RequestId> &seen, Rreq &rreq)
    {
        if (rreq.target == self)
        {
            if (std::find(rreq.route.begin(), rreq.route.end(), self) != rreq.route.end())
            {
                return RreqAction::Drop;
            }
            rreq.route.push_back(self);
            return RreqAction::Reply;
        }
        if (!seen.insert(rreq.request_id).second)
        {
            return RreqAction::Drop;
        }
        if (std::find(rreq.route.begin(), rreq.route.end(), self) != rreq.route.end())
        {
            return RreqAction::Drop;
        }
        rreq.route.push_back(self);
        return RreqAction::Rebroadcast;
    }

    /// Reply for a request whose route already ends at the target.
    inline Rrep make_rrep(const Rreq &rreq, PacketId id, double target_energy)
    {
        Rrep r;
        r.id = id;
        r.request_id = rreq.request_id;
        r.route = rreq.route;
        r.deadline = rreq.deadline;
        r.target_energy = target_energy;
        r.hop = r.route.size() - 1;
        return r;
    }

    // ---------------------------------------------------------------------
    // Route reply

    enum class RrepAction : std::uint8_t
    {
        ForwardTowardSource,
        Discard,
        DeliverToOrigin,
    };

    /// Processes a reply at the node route[rrep.hop]. Stamping policies check
    /// the accumulated delay against the deadline before stamping; the origin
    /// applies the same check to the complete sum.
    inline RrepAction handle_rrep(const NodeStatus &self, Rrep &rrep, const Policy &policy, const QosConfig &qos)
    {
        if (rrep.hop == 0)
        {
            if (policy.stamps_replies() && rrep_admission_check(rrep, rrep.deadline) == Admission::Discard)
            {
                return RrepAction::Discard;
            }
            return RrepAction::DeliverToOrigin;
        }
        if (policy.stamps_replies())
        {
            if (rrep_admission_check(rrep, rrep.deadline) == Admission::Discard)
            {
                return RrepAction::Discard;
            }
            stamp_status(self, rrep, qos);
        }
        return RrepAction::ForwardTowardSource;
    }

    inline RouteCandidate to_candidate(const Rrep &rrep)
    {
        return RouteCandidate{rrep.route, rrep.stamps, rrep.cost, rrep.cost_delay, rrep.target_energy};
    }

    /// Effective cost parameters for a policy: the eddsr-* presets fix the
    /// weights (unit scale); plain eddsr keeps the scenario's configuration.
    inline QosConfig effective_qos(const Policy &policy, QosConfig base)
    {
        if (policy.weights)
        {
            base.weights = *policy.weights;
            base.scale = 1.0;
            base.preset = policy.name;
        }
        return base;
    }

    /// Winner among collected replies: fewest hops for DSR, otherwise the
    /// policy's minimum score. Ties fall back to tie_break_less.
    inline RouteCacheEntry select_route(std::span<const RouteCandidate> candidates, const Policy &policy,
                                        const ScoringContext &ctx, SimTime now)
    {
        std::vector<ScoredRoute> scored;
        scored.reserve(candidates.size());
        for (const auto &c : candidates)
        {
            scored.push_back({c.route, policy_score(policy, c, ctx)});
        }
        const auto best = select_min_cost(scored);
        const auto &c = candidates[best];
        RouteCacheEntry e;
        e.route = c.route;
        e.score = scored[best].score;
        if (policy.stamps_replies())
        {
            e.breakdown = route_cost(c.stamps, ctx.qos, c.hop_count());
        }
        else
        {
            e.breakdown.total = e.score;
        }
        e.inserted_at = now;
        return e;
    }

    // ---------------------------------------------------------------------
    // Data forwarding

    enum class DataAction : std::uint8_t
    {
        NextHop,
        Deliver,
        DropExpired,
        DropBroken,
    };

    /// Decision for a data packet held by route[pkt.hop]. Only deadline-aware
    /// policies discard expired packets.
    inline DataAction forward_data(const DataPacket &pkt, SimTime now, bool drops_expired, bool next_hop_reachable)
    {
        if (drops_expired && pkt.expired(now))
        {
            return DataAction::DropExpired;
        }
        if (pkt.hop + 1 >= pkt.route.size())
        {
            return DataAction::Deliver;
        }
        return next_hop_reachable ? DataAction::NextHop : DataAction::DropBroken;
    }

    /// Route error travelling from the node that saw the break back to the source.
    inline Rerr make_rerr(const DataPacket &pkt, PacketId id)
    {
        Rerr e;
        e.id = id;
        e.link_from = pkt.route[pkt.hop];
        e.link_to = pkt.route[pkt.hop + 1];
        e.path.assign(pkt.route.rbegin() + static_cast<std::ptrdiff_t>(pkt.route.size() - 1 - pkt.hop), pkt.route.rend());
        e.hop = 0;
        return e;
    }

    /// Time left before the packet's deadline, for the real-time admission test.
    inline double remaining_time(const DataPacket &pkt, SimTime now) { return pkt.deadline - pkt.elapsed(now); }
} // namespace manet
