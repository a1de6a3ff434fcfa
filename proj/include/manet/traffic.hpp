#pragma once

#include "manet/engine.hpp"
#include "manet/mobility.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace manet
{
    /// Constant-bit-rate real-time flow. A negative dst means "last node".
    struct CbrFlow
    {
        NodeId src = 0;
        NodeId dst = -1;
        double rate = 10.0;     // packets/s
        int packet_size = 512;  // bytes
        double deadline = 15.0; // s
        double start = 0.0;
        double stop = 1000.0;
    };

    /// Send instants start, start + 1/rate, ... strictly before stop. Each is
    /// computed from its index, so there is no drift over long flows.
    inline std::vector<SimTime> cbr_schedule(const CbrFlow &flow)
    {
        if (!(flow.rate > 0.0))
        {
            throw std::invalid_argument("CBR rate must be positive");
        }
        std::vector<SimTime> out;
        const auto stop = SimTime::from_seconds(flow.stop);
        for (std::int64_t k = 0;; ++k)
        {
            const auto t = SimTime::from_seconds(flow.start + static_cast<double>(k) / flow.rate);
            if (!(t < stop))
            {
                break;
            }
            out.push_back(t);
        }
        return out;
    }

    /// CBR packet ids interleave flows: id = seq * n_flows + flow_index.
    inline constexpr std::int64_t cbr_packet_id(std::int64_t seq, int flow_index, int n_flows) noexcept
    {
        return seq * n_flows + flow_index;
    }

    inline constexpr int cbr_flow_of(std::int64_t packet_id, int n_flows) noexcept
    {
        return static_cast<int>(packet_id % n_flows);
    }
} // namespace manet
