#pragma once

// One replication of a scenario: nodes move, CBR sources generate packets,
// routes are discovered and used, and every packet-level event is traced.

#include "manet/engine.hpp"
#include "manet/metrics.hpp"
#include "manet/mobility.hpp"
#include "manet/netmodel.hpp"
#include "manet/packets.hpp"
#include "manet/qos.hpp"
#include "manet/routing.hpp"
#include "manet/scenario.hpp"
#include "manet/trace.hpp"
#include "manet/traffic.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace manet
{
    struct MobilityRecord
    {
        SimTime time;
        NodeId node = 0;
        Vec2 position;
        MovePhase phase = MovePhase::Moving;

        friend bool operator==(const MobilityRecord &, const MobilityRecord &) = default;
    };

    struct RunStats
    {
        std::int64_t discoveries = 0;
        std::int64_t rreq_transmissions = 0;
        std::int64_t rrep_transmissions = 0;
        std::int64_t rerr_transmissions = 0;
        std::int64_t data_transmissions = 0;
        std::int64_t events = 0;
    };

    struct RunResult
    {
        std::uint64_t seed = 0;
        std::vector<TraceEvent> trace;
        std::vector<MobilityRecord> mobility;
        std::vector<EnergyState> energy;
        MetricsReport report;
        RunStats stats;

        double energy_consumed() const
        {
            double sum = 0.0;
            for (const auto &e : energy) sum += e.consumed();
            return sum;
        }

        double max_ledger_error() const
        {
            double m = 0.0;
            for (const auto &e : energy) m = std::max(m, e.ledger_error());
            return m;
        }
    };

    /// Metrics context of a scenario; pairs with compute_report() to turn a
    /// trace (in memory or read back from disk) into a report.
    inline MetricsContext metrics_context(const Scenario &s, double energy_consumed)
    {
        MetricsContext ctx;
        ctx.n_smh = s.n_smh;
        ctx.run_length = s.duration;
        ctx.packet_bytes = s.sizes.data;
        ctx.energy_consumed = energy_consumed;
        std::vector<double> deadlines;
        for (const auto &f : s.flows) deadlines.push_back(f.deadline);
        ctx.deadline_of = [deadlines](PacketId id) {
            return deadlines[static_cast<std::size_t>(cbr_flow_of(id, static_cast<int>(deadlines.size())))];
        };
        return ctx;
    }

    class World
    {
    public:
        World(const Scenario &s, std::uint64_t seed)
            : sc_(s), seed_(seed), policy_(s.policy), qos_(s.qos_for_run()), scoring_(s.scoring()),
              t_local_(SimTime::from_seconds(qos_.t_local))
        {
            s.validate();
            const auto n = s.total_nodes();
            nodes_.reserve(static_cast<std::size_t>(n));
            for (NodeId id = 0; id < n; ++id)
            {
                nodes_.emplace_back(id, s, seed);
            }
            for (std::size_t i = 0; i < s.flows.size(); ++i)
            {
                flows_.push_back(FlowState{s.resolved(s.flows[i]), {}, 0});
                flows_.back().sends = cbr_schedule(flows_.back().flow);
            }
        }

        RunResult run()
        {
            const auto end = SimTime::from_seconds(sc_.duration);
            sched_.schedule(end, EventKind::SimEnd);
            for (auto &node : nodes_)
            {
                record_mobility(node);
                schedule_leg_end(node);
            }
            for (std::size_t i = 0; i < flows_.size(); ++i)
            {
                if (!flows_[i].sends.empty())
                {
                    sched_.schedule(flows_[i].sends.front(), EventKind::CbrSend, Payload{.flow = static_cast<int>(i)});
                }
            }
            stats_.events = static_cast<std::int64_t>(sched_.run_until(end, [this](Event &&ev) { dispatch(std::move(ev)); }));

            RunResult r;
            r.seed = seed_;
            r.trace = std::move(trace_);
            r.mobility = std::move(mobility_);
            for (const auto &node : nodes_) r.energy.push_back(node.energy);
            r.stats = stats_;
            r.report = compute_report(r.trace, metrics_context(sc_, r.energy_consumed()));
            return r;
        }

    private:
        struct Payload
        {
            NodeId node = 0;
            NodeId dst = 0;
            int flow = -1;
            Packet packet{};
        };
        using Event = SimEvent<Payload>;

        struct Discovery
        {
            RequestId request_id;
            double deadline = 15.0;
            std::vector<RouteCandidate> candidates;
            std::vector<DataPacket> buffered;
            EventHandle window{};
        };

        struct Node
        {
            Node(NodeId node_id, const Scenario &s, std::uint64_t seed)
                : id(node_id), cls(s.class_of(node_id)), mobility(s.mobility_of(node_id)),
                  rng(seed, "mobility/" + std::to_string(node_id)),
                  energy(s.initial_energy(node_id), s.p_tx, s.p_rx), queue(s.queue_capacity),
                  cache(SimTime::from_seconds(s.routing.cache_lifetime))
            {
                way = init_waypoint(s.area, mobility, rng);
            }

            NodeId id;
            NodeClass cls;
            MobilityParams mobility;
            RngStream rng;
            WaypointState way;
            EnergyState energy;
            bool alive = true;
            NodeQueue<Frame> queue;
            std::optional<Frame> in_service;
            bool busy = false;
            EventHandle service{};
            std::set<RequestId> seen;
            RouteCache cache;
            std::map<NodeId, Discovery> discoveries;
            std::uint32_t rreq_counter = 0;
            std::map<std::pair<NodeId, NodeId>, SimTime> rerr_sent;

            /// Can transmit and receive.
            bool up() const noexcept { return alive && energy.has_energy(); }
        };

        struct FlowState
        {
            CbrFlow flow;
            std::vector<SimTime> sends;
            std::size_t next = 0;
        };

        // -----------------------------------------------------------------
        // helpers

        SimTime now() const { return sched_.now(); }
        Node &node(NodeId id) { return nodes_[static_cast<std::size_t>(id)]; }
        Vec2 position(const Node &n) const { return position_at(n.way, now().seconds()); }
        Vec2 position(NodeId id) const { return position(nodes_[static_cast<std::size_t>(id)]); }

        bool reachable(NodeId from, NodeId to) const
        {
            const auto &b = nodes_[static_cast<std::size_t>(to)];
            return b.up() && sc_.link.in_range(position(from), position(b));
        }

        void trace(TraceKind kind, NodeId n, PacketId p, PacketType t, DropReason r = DropReason::None)
        {
            trace_.push_back(TraceEvent{now(), kind, n, p, t, r});
        }

        /// Under deadline-aware policies a packet that is already past its
        /// deadline is recorded as expired, whatever removed it.
        void trace_drop(NodeId n, const Packet &p, DropReason r)
        {
            const auto id = packet_id(p);
            if (const auto *d = std::get_if<DataPacket>(&p); d && policy_.drops_expired() && d->expired(now()))
            {
                r = DropReason::Expired;
            }
            trace(TraceKind::Drop, n, id, packet_type(p), r);
            if (packet_type(p) == PacketType::Cbr)
            {
                live_.erase(id);
            }
        }

        PacketId next_control_id() { return next_control_id_++; }

        void record_mobility(const Node &n)
        {
            mobility_.push_back(MobilityRecord{now(), n.id, position(n), n.way.phase});
        }

        // -----------------------------------------------------------------
        // dispatch

        void dispatch(Event &&ev)
        {
            if (ended_)
            {
                return;
            }
            switch (ev.kind)
            {
            case EventKind::SimEnd: finish(); break;
            case EventKind::WaypointReached: on_waypoint(node(ev.payload.node)); break;
            case EventKind::PauseEnd: on_pause_end(node(ev.payload.node)); break;
            case EventKind::CbrSend: on_cbr_send(ev.payload.flow); break;
            case EventKind::QueueService: on_service(node(ev.payload.node)); break;
            case EventKind::PacketArrival: on_arrival(node(ev.payload.node), std::move(ev.payload.packet)); break;
            case EventKind::RrepWindowClose: on_window_close(node(ev.payload.node), ev.payload.dst); break;
            case EventKind::NodeDeath: on_death(node(ev.payload.node)); break;
            }
        }

        // -----------------------------------------------------------------
        // mobility

        void schedule_leg_end(Node &n)
        {
            const auto kind = n.way.phase == MovePhase::Paused ? EventKind::PauseEnd : EventKind::WaypointReached;
            const auto at = std::max(now(), SimTime::ceil_seconds(n.way.leg_end()));
            sched_.schedule(at, kind, Payload{.node = n.id});
        }

        void on_waypoint(Node &n)
        {
            n.way = on_waypoint_reached(n.way, now().seconds(), sc_.area, n.mobility, n.rng);
            record_mobility(n);
            schedule_leg_end(n);
        }

        void on_pause_end(Node &n)
        {
            n.way = manet::on_pause_end(n.way, now().seconds(), sc_.area, n.mobility, n.rng);
            record_mobility(n);
            schedule_leg_end(n);
        }

        // -----------------------------------------------------------------
        // traffic

        void on_cbr_send(int flow_index)
        {
            auto &fs = flows_[static_cast<std::size_t>(flow_index)];
            const auto &f = fs.flow;
            auto &src = node(f.src);
            if (!src.up())
            {
                return; // a dead source generates nothing further
            }
            DataPacket pkt;
            pkt.id = cbr_packet_id(static_cast<std::int64_t>(fs.next), flow_index, static_cast<int>(flows_.size()));
            pkt.flow = flow_index;
            pkt.src = f.src;
            pkt.dst = f.dst;
            pkt.size_bytes = f.packet_size;
            pkt.generated = now();
            pkt.deadline = f.deadline;
            trace(TraceKind::Send, src.id, pkt.id, PacketType::Cbr);
            live_[pkt.id] = src.id;

            if (++fs.next < fs.sends.size())
            {
                sched_.schedule(fs.sends[fs.next], EventKind::CbrSend, Payload{.flow = flow_index});
            }

            if (const auto *entry = src.cache.fresh(f.dst, now()))
            {
                pkt.route = entry->route;
                pkt.hop = 0;
                enqueue(src, Frame{std::move(pkt), entry->route[1]});
                return;
            }
            auto &disc = discovery_for(src, f.dst, f.deadline);
            if (disc.buffered.size() >= sc_.routing.send_buffer)
            {
                trace_drop(src.id, pkt, DropReason::QueueFull);
                return;
            }
            disc.buffered.push_back(std::move(pkt));
        }

        // -----------------------------------------------------------------
        // route discovery

        /// Outstanding discovery toward dst, starting one if there is none.
        Discovery &discovery_for(Node &src, NodeId dst, double deadline)
        {
            if (auto it = src.discoveries.find(dst); it != src.discoveries.end())
            {
                return it->second;
            }
            Rreq rreq;
            rreq.id = next_control_id();
            rreq.request_id = RequestId{src.id, src.rreq_counter++};
            rreq.origin = src.id;
            rreq.target = dst;
            rreq.route = {src.id};
            rreq.deadline = deadline;
            rreq.originated = now();
            src.seen.insert(rreq.request_id);
            ++stats_.discoveries;

            Discovery d;
            d.request_id = rreq.request_id;
            d.deadline = deadline;
            d.window = sched_.schedule_in(SimTime::from_seconds(sc_.routing.reply_window), EventKind::RrepWindowClose,
                                          Payload{.node = src.id, .dst = dst});
            trace(TraceKind::Send, src.id, rreq.id, PacketType::Rreq);
            enqueue(src, Frame{std::move(rreq), kBroadcast});
            return src.discoveries.emplace(dst, std::move(d)).first->second;
        }

        void on_window_close(Node &src, NodeId dst)
        {
            auto it = src.discoveries.find(dst);
            if (it == src.discoveries.end())
            {
                return;
            }
            Discovery d = std::move(it->second);
            src.discoveries.erase(it);
            if (d.candidates.empty())
            {
                for (auto &p : d.buffered) trace_drop(src.id, p, DropReason::NoRoute);
                return;
            }
            auto entry = select_route(d.candidates, policy_, scoring_, now());
            src.cache.insert(dst, entry);
            for (auto &p : d.buffered)
            {
                if (policy_.drops_expired() && p.expired(now()))
                {
                    trace_drop(src.id, p, DropReason::Expired);
                    continue;
                }
                p.route = entry.route;
                p.hop = 0;
                const auto next = entry.route[1];
                enqueue(src, Frame{std::move(p), next});
            }
        }

        // -----------------------------------------------------------------
        // queueing and transmission

        void enqueue(Node &n, Frame f)
        {
            const bool control = f.is_control();
            if (n.queue.full())
            {
                trace_drop(n.id, f.packet, DropReason::QueueFull);
                return;
            }
            n.queue.enqueue(std::move(f), control);
            if (!n.busy)
            {
                n.busy = true;
                n.service = sched_.schedule(now(), EventKind::QueueService, Payload{.node = n.id});
            }
        }

        void on_service(Node &n)
        {
            if (!n.up())
            {
                n.busy = false;
                return;
            }
            if (n.in_service)
            {
                Frame f = std::move(*n.in_service);
                n.in_service.reset();
                start_transmission(n, std::move(f));
                return;
            }
            if (auto f = n.queue.pop())
            {
                n.in_service = std::move(*f);
                n.service = sched_.schedule_in(t_local_, EventKind::QueueService, Payload{.node = n.id});
                return;
            }
            n.busy = false;
        }

        /// Continue with the next queued packet right away (nothing was sent).
        void service_next(Node &n)
        {
            n.service = sched_.schedule(now(), EventKind::QueueService, Payload{.node = n.id});
        }

        void start_transmission(Node &n, Frame f)
        {
            const auto type = packet_type(f.packet);
            if (type == PacketType::Cbr)
            {
                auto &pkt = std::get<DataPacket>(f.packet);
                const auto action = forward_data(pkt, now(), policy_.drops_expired(), reachable(n.id, f.next_hop));
                if (action == DataAction::DropExpired)
                {
                    trace_drop(n.id, f.packet, DropReason::Expired);
                    service_next(n);
                    return;
                }
                if (action == DataAction::DropBroken)
                {
                    link_broken(n, pkt);
                    service_next(n);
                    return;
                }
                if (pkt.hop > 0)
                {
                    trace(TraceKind::Fwd, n.id, pkt.id, type);
                }
                ++stats_.data_transmissions;
            }
            else if (f.next_hop != kBroadcast && !reachable(n.id, f.next_hop))
            {
                trace_drop(n.id, f.packet, DropReason::BrokenLink);
                service_next(n);
                return;
            }
            else
            {
                const bool originated = (type == PacketType::Rreq && std::get<Rreq>(f.packet).route.size() == 1) ||
                                        (type == PacketType::Rrep && std::get<Rrep>(f.packet).hop + 1 == std::get<Rrep>(f.packet).route.size()) ||
                                        (type == PacketType::Rerr && std::get<Rerr>(f.packet).hop == 0);
                if (!originated)
                {
                    trace(TraceKind::Fwd, n.id, packet_id(f.packet), type);
                }
                if (type == PacketType::Rreq) ++stats_.rreq_transmissions;
                if (type == PacketType::Rrep) ++stats_.rrep_transmissions;
                if (type == PacketType::Rerr) ++stats_.rerr_transmissions;
            }
            transmit(n, std::move(f));
        }

        /// Charges the radios and schedules arrivals; the sender is busy for t_tx.
        void transmit(Node &n, Frame f)
        {
            const auto d = sc_.link.t_tx(sc_.sizes.bytes(f.packet));
            std::vector<NodeId> receivers;
            if (f.next_hop == kBroadcast)
            {
                std::vector<Vec2> pos;
                pos.reserve(nodes_.size());
                for (const auto &m : nodes_) pos.push_back(position(m));
                receivers = neighbors(n.id, pos, [this](NodeId j) { return nodes_[static_cast<std::size_t>(j)].up(); }, sc_.link);
            }
            else
            {
                receivers.push_back(f.next_hop);
            }
            std::vector<NodeId> depleted;
            if (n.energy.charge_tx(d)) depleted.push_back(n.id);
            for (auto r : receivers)
            {
                if (node(r).energy.charge_rx(d)) depleted.push_back(r);
            }
            const auto at = now() + d;
            for (auto r : receivers)
            {
                sched_.schedule(at, EventKind::PacketArrival, Payload{.node = r, .packet = f.packet});
            }
            if (f.packet.index() == 0)
            {
                live_[packet_id(f.packet)] = f.next_hop;
            }
            n.service = sched_.schedule(at, EventKind::QueueService, Payload{.node = n.id});
            for (auto id : depleted)
            {
                sched_.schedule(at, EventKind::NodeDeath, Payload{.node = id});
            }
        }

        // -----------------------------------------------------------------
        // reception

        void on_arrival(Node &n, Packet p)
        {
            if (!n.alive)
            {
                trace_drop(n.id, p, DropReason::Dead);
                return;
            }
            switch (packet_type(p))
            {
            case PacketType::Cbr: on_data(n, std::move(std::get<DataPacket>(p))); break;
            case PacketType::Rreq: on_rreq(n, std::move(std::get<Rreq>(p))); break;
            case PacketType::Rrep: on_rrep(n, std::move(std::get<Rrep>(p))); break;
            case PacketType::Rerr: on_rerr(n, std::move(std::get<Rerr>(p))); break;
            }
        }

        void on_data(Node &n, DataPacket pkt)
        {
            ++pkt.hop;
            const bool at_dst = pkt.hop + 1 >= pkt.route.size();
            const bool next_ok = at_dst || reachable(n.id, pkt.route[pkt.hop + 1]);
            switch (forward_data(pkt, now(), policy_.drops_expired(), next_ok))
            {
            case DataAction::Deliver:
                trace(TraceKind::Recv, n.id, pkt.id, PacketType::Cbr);
                live_.erase(pkt.id);
                break;
            case DataAction::DropExpired: trace_drop(n.id, pkt, DropReason::Expired); break;
            case DataAction::DropBroken: link_broken(n, pkt); break;
            case DataAction::NextHop:
            {
                const auto next = pkt.route[pkt.hop + 1];
                enqueue(n, Frame{std::move(pkt), next});
                break;
            }
            }
        }

        /// The next hop of `pkt` is gone: drop it and tell the source, which
        /// purges the link from its cache.
        void link_broken(Node &n, const DataPacket &pkt)
        {
            trace_drop(n.id, pkt, DropReason::BrokenLink);
            const NodeId a = pkt.route[pkt.hop];
            const NodeId b = pkt.route[pkt.hop + 1];
            n.cache.purge_link(a, b);
            if (pkt.hop == 0)
            {
                return;
            }
            const auto key = std::pair{a, b};
            const auto window = SimTime::from_seconds(sc_.routing.reply_window);
            if (auto it = n.rerr_sent.find(key); it != n.rerr_sent.end() && now() - it->second < window)
            {
                return;
            }
            n.rerr_sent[key] = now();
            Rerr e = make_rerr(pkt, next_control_id());
            trace(TraceKind::Send, n.id, e.id, PacketType::Rerr);
            const auto next = e.path[1];
            enqueue(n, Frame{std::move(e), next});
        }

        void on_rerr(Node &n, Rerr e)
        {
            ++e.hop;
            n.cache.purge_link(e.link_from, e.link_to);
            if (e.hop + 1 >= e.path.size())
            {
                trace(TraceKind::Recv, n.id, e.id, PacketType::Rerr);
                return;
            }
            const auto next = e.path[e.hop + 1];
            enqueue(n, Frame{std::move(e), next});
        }

        void on_rreq(Node &n, Rreq rreq)
        {
            if (policy_.rtdsr_admission && !admits_request(n, rreq))
            {
                trace(TraceKind::Drop, n.id, rreq.id, PacketType::Rreq, DropReason::Expired);
                return;
            }
            switch (handle_rreq(n.id, n.seen, rreq))
            {
            case RreqAction::Drop:
                trace(TraceKind::Drop, n.id, rreq.id, PacketType::Rreq, DropReason::Duplicate);
                break;
            case RreqAction::Rebroadcast: enqueue(n, Frame{std::move(rreq), kBroadcast}); break;
            case RreqAction::Reply:
            {
                trace(TraceKind::Recv, n.id, rreq.id, PacketType::Rreq);
                Rrep rep = make_rrep(rreq, next_control_id(), n.energy.residual());
                trace(TraceKind::Send, n.id, rep.id, PacketType::Rrep);
                const auto next = rep.route[rep.hop - 1];
                enqueue(n, Frame{std::move(rep), next});
                break;
            }
            }
        }

        /// Real-time admission at a node: the request and every real-time
        /// packet already queued here must keep positive slack.
        bool admits_request(const Node &n, const Rreq &rreq) const
        {
            RtdsrParams p;
            p.e_remaining = rreq.deadline - (now() - rreq.originated).seconds();
            p.t_local = qos_.t_local;
            p.t_transmit = qos_.t_transmit;
            n.queue.for_each([&](const Frame &f) {
                if (const auto *d = std::get_if<DataPacket>(&f.packet))
                {
                    p.admitted.push_back(remaining_time(*d, now()));
                }
            });
            return rtdsr_admission(p) == RtdsrDecision::Admit;
        }

        void on_rrep(Node &n, Rrep rep)
        {
            --rep.hop;
            NodeStatus st;
            st.node = n.id;
            st.queue_length = static_cast<int>(n.queue.size());
            st.energy = n.energy.residual();
            if (rep.hop > 0)
            {
                st.distance_to_next = distance(position(n), position(rep.route[rep.hop - 1]));
            }
            if (rep.hop > 0 && policy_.stamps_replies() && !n.energy.has_energy())
            {
                trace(TraceKind::Drop, n.id, rep.id, PacketType::Rrep, DropReason::Dead);
                return;
            }
            switch (handle_rrep(st, rep, policy_, qos_))
            {
            case RrepAction::Discard:
                trace(TraceKind::Drop, n.id, rep.id, PacketType::Rrep, DropReason::Expired);
                break;
            case RrepAction::ForwardTowardSource:
            {
                const auto next = rep.route[rep.hop - 1];
                enqueue(n, Frame{std::move(rep), next});
                break;
            }
            case RrepAction::DeliverToOrigin:
            {
                const auto dst = rep.route.back();
                auto it = n.discoveries.find(dst);
                if (it == n.discoveries.end() || it->second.request_id != rep.request_id)
                {
                    trace(TraceKind::Drop, n.id, rep.id, PacketType::Rrep, DropReason::None);
                    break;
                }
                trace(TraceKind::Recv, n.id, rep.id, PacketType::Rrep);
                it->second.candidates.push_back(to_candidate(rep));
                break;
            }
            }
        }

        // -----------------------------------------------------------------
        // death and end of run

        void on_death(Node &n)
        {
            if (!n.alive)
            {
                return;
            }
            n.alive = false;
            trace(TraceKind::Die, n.id, -1, PacketType::Cbr);
            sched_.cancel(n.service);
            n.busy = false;
            if (n.in_service)
            {
                trace_drop(n.id, n.in_service->packet, DropReason::Dead);
                n.in_service.reset();
            }
            for (auto &f : n.queue.drain()) trace_drop(n.id, f.packet, DropReason::Dead);
            for (auto &[dst, d] : n.discoveries)
            {
                sched_.cancel(d.window);
                for (auto &p : d.buffered) trace_drop(n.id, p, DropReason::Dead);
            }
            n.discoveries.clear();
        }

        /// Packets still in flight when the run ends get a terminal DROP r=none.
        void finish()
        {
            ended_ = true;
            const auto n_flows = static_cast<int>(flows_.size());
            for (const auto &[id, holder] : live_)
            {
                const auto &fs = flows_[static_cast<std::size_t>(cbr_flow_of(id, n_flows))];
                const auto generated = fs.sends[static_cast<std::size_t>(id / n_flows)];
                const bool expired = policy_.drops_expired() && now() - generated > SimTime::from_seconds(fs.flow.deadline);
                trace(TraceKind::Drop, holder, id, PacketType::Cbr, expired ? DropReason::Expired : DropReason::None);
            }
            live_.clear();
        }

        const Scenario &sc_;
        std::uint64_t seed_;
        Policy policy_;
        QosConfig qos_;
        ScoringContext scoring_;
        SimTime t_local_;
        Scheduler<Payload> sched_;
        std::vector<Node> nodes_;
        std::vector<FlowState> flows_;
        std::vector<TraceEvent> trace_;
        std::vector<MobilityRecord> mobility_;
        std::map<PacketId, NodeId> live_;
        PacketId next_control_id_ = 0;
        RunStats stats_;
        bool ended_ = false;
    };

    inline RunResult run_scenario(const Scenario &s, std::uint64_t seed)
    {
        World w(s, seed);
        return w.run();
    }
} // namespace manet
