#pragma once

#include "manet/engine.hpp"
#include "manet/mobility.hpp"

#include <compare>
#include <cstdint>
#include <string_view>
#include <variant>
#include <vector>

namespace manet
{
    using PacketId = std::int64_t;
    inline constexpr NodeId kBroadcast = -1;

    enum class PacketType : std::uint8_t
    {
        Cbr,
        Rreq,
        Rrep,
        Rerr,
    };

    inline constexpr std::string_view to_string(PacketType t) noexcept
    {
        switch (t)
        {
        case PacketType::Cbr: return "CBR";
        case PacketType::Rreq: return "RREQ";
        case PacketType::Rrep: return "RREP";
        case PacketType::Rerr: return "RERR";
        }
        return "?";
    }

    struct RequestId
    {
        NodeId origin = 0;
        std::uint32_t counter = 0;

        auto operator<=>(const RequestId &) const = default;
    };

    /// Status an intermediate node writes into a route reply on its way back.
    struct NodeStatusStamp
    {
        NodeId node = 0;
        double d_i = 0.0;      // metres to the next hop toward the source
        int l_queue = 0;       // packets waiting in the node queue
        double e_remain = 0.0; // joules

        friend bool operator==(const NodeStatusStamp &, const NodeStatusStamp &) = default;
    };

    struct DataPacket
    {
        PacketId id = 0;
        int flow = 0;
        NodeId src = 0;
        NodeId dst = 0;
        int size_bytes = 512;
        SimTime generated;
        double deadline = 15.0;
        std::vector<NodeId> route; // src ... dst
        std::size_t hop = 0;       // index in route of the current holder

        double elapsed(SimTime now) const { return (now - generated).seconds(); }
        bool expired(SimTime now) const { return now - generated > SimTime::from_seconds(deadline); }
    };

    struct Rreq
    {
        PacketId id = 0;
        RequestId request_id;
        NodeId origin = 0;
        NodeId target = 0;
        std::vector<NodeId> route; // origin first
        double deadline = 15.0;
        SimTime originated;
    };

    struct Rrep
    {
        PacketId id = 0;
        RequestId request_id;
        std::vector<NodeId> route; // origin ... target
        std::vector<NodeStatusStamp> stamps;
        double cost = 0.0;        // accumulated C
        double cost_delay = 0.0;  // accumulated C_delay
        double target_energy = 0.0;
        double deadline = 15.0;
        std::size_t hop = 0; // index in route of the current holder

        std::size_t hop_count() const { return route.empty() ? 0 : route.size() - 1; }
    };

    struct Rerr
    {
        PacketId id = 0;
        NodeId link_from = 0;
        NodeId link_to = 0;
        std::vector<NodeId> path; // detecting node ... source
        std::size_t hop = 0;
    };

    using Packet = std::variant<DataPacket, Rreq, Rrep, Rerr>;

    inline PacketType packet_type(const Packet &p) noexcept
    {
        return static_cast<PacketType>(p.index());
    }

    inline PacketId packet_id(const Packet &p) noexcept
    {
        return std::visit([](const auto &x) { return x.id; }, p);
    }

    /// Sizes used for transmission time and energy.
    struct PacketSizes
    {
        int data = 512;
        int rreq_base = 32;
        int rreq_per_node = 4;
        int rrep_base = 44;
        int rrep_per_stamp = 16;
        int rerr = 24;

        int bytes(const Packet &p) const
        {
            switch (packet_type(p))
            {
            case PacketType::Cbr: return std::get<DataPacket>(p).size_bytes;
            case PacketType::Rreq: return rreq_base + rreq_per_node * static_cast<int>(std::get<Rreq>(p).route.size());
            case PacketType::Rrep: return rrep_base + rrep_per_stamp * static_cast<int>(std::get<Rrep>(p).stamps.size());
            case PacketType::Rerr: return rerr;
            }
            return 0;
        }
    };

    /// A packet waiting for transmission, with its link-layer destination.
    struct Frame
    {
        Packet packet;
        NodeId next_hop = kBroadcast;

        bool is_control() const noexcept { return packet_type(packet) != PacketType::Cbr; }
    };
} // namespace manet
