#pragma once

// The five performance metrics, computed from a trace. The simulator's own
// report goes through these same functions, so a trace written to disk and
// read back reproduces it.

#include "manet/trace.hpp"
#include "manet/traffic.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace manet
{
    class ZeroGenerated : public std::domain_error
    {
    public:
        ZeroGenerated() : std::domain_error("no CBR packets were generated") {}
    };

    class NoDeliveries : public std::domain_error
    {
    public:
        NoDeliveries() : std::domain_error("no CBR packets were delivered") {}
    };

    struct DeliveryCounts
    {
        std::int64_t generated = 0;
        std::int64_t delivered = 0;
        std::int64_t delivered_in_time = 0;
        std::int64_t dropped = 0;
        std::int64_t delay_sum_us = 0; // over delivered packets
    };

    /// Deadline (s) of a CBR packet given its id.
    using DeadlineOf = std::function<double(PacketId)>;

    inline DeliveryCounts count_deliveries(std::span<const TraceEvent> trace, const DeadlineOf &deadline_of)
    {
        DeliveryCounts c;
        std::unordered_map<PacketId, SimTime> sent;
        for (const auto &e : trace)
        {
            if (e.type != PacketType::Cbr)
            {
                continue;
            }
            switch (e.kind)
            {
            case TraceKind::Send:
                ++c.generated;
                sent.emplace(e.packet, e.time);
                break;
            case TraceKind::Recv:
            {
                auto it = sent.find(e.packet);
                if (it == sent.end())
                {
                    break;
                }
                const auto delay = e.time - it->second;
                ++c.delivered;
                c.delay_sum_us += delay.micros();
                if (delay <= SimTime::from_seconds(deadline_of(e.packet)))
                {
                    ++c.delivered_in_time;
                }
                break;
            }
            case TraceKind::Drop: ++c.dropped; break;
            default: break;
            }
        }
        return c;
    }

    inline double delivery_ratio(const DeliveryCounts &c)
    {
        if (c.generated == 0)
        {
            throw ZeroGenerated();
        }
        return static_cast<double>(c.delivered) / static_cast<double>(c.generated);
    }

    inline double in_time_ratio(const DeliveryCounts &c)
    {
        if (c.generated == 0)
        {
            throw ZeroGenerated();
        }
        return static_cast<double>(c.delivered_in_time) / static_cast<double>(c.generated);
    }

    inline std::optional<double> mean_e2e_delay(const DeliveryCounts &c)
    {
        if (c.delivered == 0)
        {
            return std::nullopt;
        }
        return static_cast<double>(c.delay_sum_us) / 1e6 / static_cast<double>(c.delivered);
    }

    inline double delivery_ratio(std::span<const TraceEvent> trace)
    {
        return delivery_ratio(count_deliveries(trace, [](PacketId) { return 0.0; }));
    }

    inline double in_time_ratio(std::span<const TraceEvent> trace, double d_k)
    {
        return in_time_ratio(count_deliveries(trace, [d_k](PacketId) { return d_k; }));
    }

    inline std::optional<double> mean_e2e_delay(std::span<const TraceEvent> trace)
    {
        return mean_e2e_delay(count_deliveries(trace, [](PacketId) { return 0.0; }));
    }

    struct Lifetime
    {
        double smh = 0.0;               // first SMH death, or run length if none
        std::optional<double> any;      // first death of any node, if any
        bool censored = false;          // no SMH died before the end
    };

    /// SMH nodes are ids 0 .. n_smh-1.
    inline Lifetime network_lifetime(std::span<const TraceEvent> trace, NodeId n_smh, double run_length)
    {
        Lifetime l;
        std::optional<SimTime> first_smh;
        std::optional<SimTime> first_any;
        for (const auto &e : trace)
        {
            if (e.kind != TraceKind::Die)
            {
                continue;
            }
            if (!first_any || e.time < *first_any)
            {
                first_any = e.time;
            }
            if (e.node < n_smh && (!first_smh || e.time < *first_smh))
            {
                first_smh = e.time;
            }
        }
        l.censored = !first_smh.has_value();
        l.smh = first_smh ? first_smh->seconds() : run_length;
        if (first_any)
        {
            l.any = first_any->seconds();
        }
        return l;
    }

    /// Network-wide consumed energy over delivered payload bits.
    inline double energy_per_bit(double consumed_j, std::int64_t delivered_packets, int packet_bytes)
    {
        if (delivered_packets <= 0)
        {
            throw NoDeliveries();
        }
        return consumed_j / (static_cast<double>(delivered_packets) * packet_bytes * 8.0);
    }

    struct MetricsReport
    {
        double delivery_ratio = 0.0;
        double in_time_ratio = 0.0;
        std::optional<double> mean_e2e_delay;
        double lifetime_smh = 0.0;
        bool lifetime_censored = true;
        std::optional<double> lifetime_any;
        std::optional<double> energy_per_bit;

        DeliveryCounts counts;
        double energy_consumed = 0.0;
    };

    struct MetricsContext
    {
        NodeId n_smh = 0;
        double run_length = 0.0;
        int packet_bytes = 512;
        double energy_consumed = 0.0; // from the energy ledger
        DeadlineOf deadline_of;
    };

    inline MetricsReport compute_report(std::span<const TraceEvent> trace, const MetricsContext &ctx)
    {
        MetricsReport r;
        r.counts = count_deliveries(trace, ctx.deadline_of);
        if (r.counts.generated > 0)
        {
            r.delivery_ratio = delivery_ratio(r.counts);
            r.in_time_ratio = in_time_ratio(r.counts);
        }
        r.mean_e2e_delay = mean_e2e_delay(r.counts);
        const auto life = network_lifetime(trace, ctx.n_smh, ctx.run_length);
        r.lifetime_smh = life.smh;
        r.lifetime_censored = life.censored;
        r.lifetime_any = life.any;
        r.energy_consumed = ctx.energy_consumed;
        if (r.counts.delivered > 0)
        {
            r.energy_per_bit = energy_per_bit(ctx.energy_consumed, r.counts.delivered, ctx.packet_bytes);
        }
        return r;
    }

    /// Aggregate of per-replication reports: the mean of each metric over the
    /// replications where it is defined.
    struct MeanReport
    {
        double delivery_ratio = 0.0;
        double in_time_ratio = 0.0;
        std::optional<double> mean_e2e_delay;
        double lifetime_smh = 0.0;
        double censored_fraction = 0.0;
        std::optional<double> energy_per_bit;
        std::size_t replications = 0;
    };

    inline MeanReport mean_of(std::span<const MetricsReport> reports)
    {
        MeanReport m;
        m.replications = reports.size();
        if (reports.empty())
        {
            return m;
        }
        const auto n = static_cast<double>(reports.size());
        double delay_sum = 0.0, epb_sum = 0.0;
        std::size_t delay_n = 0, epb_n = 0;
        for (const auto &r : reports)
        {
            m.delivery_ratio += r.delivery_ratio;
            m.in_time_ratio += r.in_time_ratio;
            m.lifetime_smh += r.lifetime_smh;
            m.censored_fraction += r.lifetime_censored ? 1.0 : 0.0;
            if (r.mean_e2e_delay)
            {
                delay_sum += *r.mean_e2e_delay;
                ++delay_n;
            }
            if (r.energy_per_bit)
            {
                epb_sum += *r.energy_per_bit;
                ++epb_n;
            }
        }
        m.delivery_ratio /= n;
        m.in_time_ratio /= n;
        m.lifetime_smh /= n;
        m.censored_fraction /= n;
        if (delay_n > 0)
        {
            m.mean_e2e_delay = delay_sum / static_cast<double>(delay_n);
        }
        if (epb_n > 0)
        {
            m.energy_per_bit = epb_sum / static_cast<double>(epb_n);
        }
        return m;
    }
} // namespace manet
