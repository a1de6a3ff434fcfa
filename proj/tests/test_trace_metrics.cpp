#include "manet/metrics.hpp"
#include "manet/trace.hpp"
#include "manet/traffic.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace manet;

namespace
{
    SimTime s(double v) { return SimTime::from_seconds(v); }

    TraceEvent ev(double t, TraceKind k, NodeId n, PacketId p, PacketType ty = PacketType::Cbr,
                  DropReason r = DropReason::None)
    {
        return TraceEvent{s(t), k, n, p, ty, r};
    }

    /// n sends at t = i; deliveries given as (packet, delay).
    std::vector<TraceEvent> flow_trace(int n, const std::vector<std::pair<int, double>> &delivered)
    {
        std::vector<TraceEvent> t;
        for (int i = 0; i < n; ++i) t.push_back(ev(i, TraceKind::Send, 0, i));
        for (auto [p, d] : delivered) t.push_back(ev(p + d, TraceKind::Recv, 9, p));
        return t;
    }
} // namespace

TEST(Cbr, TenPerSecond)
{
    CbrFlow f;
    f.rate = 10;
    f.start = 0;
    f.stop = 1;
    const auto t = cbr_schedule(f);
    ASSERT_EQ(t.size(), 10u);
    for (int i = 0; i < 10; ++i) EXPECT_EQ(t[static_cast<std::size_t>(i)].micros(), i * 100'000);
}

TEST(Cbr, EmptyAndInvalid)
{
    CbrFlow f;
    f.start = f.stop = 3;
    EXPECT_TRUE(cbr_schedule(f).empty());
    f.rate = 0;
    EXPECT_THROW(cbr_schedule(f), std::invalid_argument);
}

TEST(Cbr, LowLoadCount)
{
    CbrFlow f;
    f.rate = 5;
    f.stop = 100;
    EXPECT_EQ(cbr_schedule(f).size(), 500u);
    f.rate = 9;
    EXPECT_EQ(cbr_schedule(f).size(), 900u);
}

TEST(Cbr, IdsInterleaveFlows)
{
    EXPECT_EQ(cbr_packet_id(3, 1, 2), 7);
    EXPECT_EQ(cbr_flow_of(7, 2), 1);
    EXPECT_EQ(cbr_flow_of(8, 1), 0);
}

TEST(Trace, LineFormat)
{
    EXPECT_EQ(format_trace_line(ev(12.5, TraceKind::Drop, 3, 41, PacketType::Cbr, DropReason::QueueFull)),
              "12.500000 DROP n=3 p=41 t=CBR r=queue_full");
    EXPECT_EQ(format_trace_line(ev(0.002048, TraceKind::Fwd, 0, 2, PacketType::Rreq)), "0.002048 FWD n=0 p=2 t=RREQ r=none");
    EXPECT_EQ(format_trace_line(ev(99, TraceKind::Die, 4, -1)), "99.000000 DIE n=4 p=-1 t=CBR r=none");
}

TEST(Trace, RejectsMalformedLines)
{
    EXPECT_THROW(parse_trace_line("1.0 SEND n=0 p=1 t=CBR r=none"), TraceParseError);
    EXPECT_THROW(parse_trace_line("1.000000 SNED n=0 p=1 t=CBR r=none"), TraceParseError);
    EXPECT_THROW(parse_trace_line("1.000000 SEND n=0 p=1 t=CBR"), TraceParseError);
    EXPECT_THROW(parse_trace_line("1.000000 SEND x=0 p=1 t=CBR r=none"), TraceParseError);
    EXPECT_THROW(parse_trace_line("1.000000 SEND n=0 p=1 t=UDP r=none"), TraceParseError);
}

TEST(Trace, RoundTripProperty)
{
    std::mt19937_64 g(77);
    std::uniform_int_distribution<std::int64_t> t(0, 10'000'000'000);
    std::uniform_int_distribution<int> kind(0, 4), type(0, 3), reason(0, 6), node(0, 99);
    std::uniform_int_distribution<PacketId> pkt(-1, 1'000'000);
    std::vector<TraceEvent> events;
    for (int i = 0; i < 5000; ++i)
    {
        events.push_back(TraceEvent{SimTime::from_micros(t(g)), static_cast<TraceKind>(kind(g)), node(g), pkt(g),
                                    static_cast<PacketType>(type(g)), static_cast<DropReason>(reason(g))});
    }
    std::stringstream ss;
    write_trace(ss, events);
    const auto text = ss.str();
    const auto back = read_trace(ss);
    EXPECT_EQ(back, events);
    std::stringstream again;
    write_trace(again, back);
    EXPECT_EQ(again.str(), text);
}

TEST(Metrics, DeliveryRatio)
{
    EXPECT_DOUBLE_EQ(delivery_ratio(flow_trace(10, {{0, 1}, {1, 1}, {2, 1}, {3, 1}, {4, 1}, {5, 1}, {6, 1}, {7, 1}})), 0.8);
    EXPECT_DOUBLE_EQ(delivery_ratio(flow_trace(10, {})), 0.0);
    std::vector<std::pair<int, double>> all;
    for (int i = 0; i < 10; ++i) all.push_back({i, 0.5});
    EXPECT_DOUBLE_EQ(delivery_ratio(flow_trace(10, all)), 1.0);
    EXPECT_THROW(delivery_ratio(std::vector<TraceEvent>{}), ZeroGenerated);
}

TEST(Metrics, InTimeRatio)
{
    const auto t = flow_trace(10, {{0, 1}, {1, 2}, {2, 15}, {3, 3}, {4, 4}, {5, 5}, {6, 16}, {7, 30}});
    EXPECT_DOUBLE_EQ(in_time_ratio(t, 15.0), 0.6);
    EXPECT_LE(in_time_ratio(t, 15.0), delivery_ratio(t));
    EXPECT_THROW(in_time_ratio(std::vector<TraceEvent>{}, 15.0), ZeroGenerated);
}

TEST(Metrics, MeanDelayOverDeliveredOnly)
{
    EXPECT_DOUBLE_EQ(*mean_e2e_delay(flow_trace(5, {{0, 1}, {1, 2}, {2, 3}})), 2.0);
    EXPECT_DOUBLE_EQ(*mean_e2e_delay(flow_trace(1, {{0, 0.5}})), 0.5);
    auto t = flow_trace(3, {{0, 1}});
    t.push_back(ev(4, TraceKind::Drop, 2, 1, PacketType::Cbr, DropReason::Expired));
    EXPECT_DOUBLE_EQ(*mean_e2e_delay(t), 1.0);
    EXPECT_FALSE(mean_e2e_delay(flow_trace(3, {})).has_value());
}

TEST(Metrics, ControlPacketsIgnored)
{
    auto t = flow_trace(2, {{0, 1}});
    t.push_back(ev(0.1, TraceKind::Send, 0, 0, PacketType::Rreq));
    t.push_back(ev(0.2, TraceKind::Recv, 9, 0, PacketType::Rreq));
    EXPECT_DOUBLE_EQ(delivery_ratio(t), 0.5);
}

TEST(Lifetime, FirstSmhDeath)
{
    std::vector<TraceEvent> t{ev(80.1, TraceKind::Die, 3, -1), ev(37.2, TraceKind::Die, 1, -1)};
    const auto l = network_lifetime(t, 10, 100);
    EXPECT_DOUBLE_EQ(l.smh, 37.2);
    EXPECT_FALSE(l.censored);
}

TEST(Lifetime, CensoredWithoutDeaths)
{
    const auto l = network_lifetime(std::vector<TraceEvent>{}, 10, 100);
    EXPECT_DOUBLE_EQ(l.smh, 100.0);
    EXPECT_TRUE(l.censored);
    EXPECT_FALSE(l.any.has_value());
}

TEST(Lifetime, SmhAndAnyDiffer)
{
    std::vector<TraceEvent> t{ev(30, TraceKind::Die, 15, -1), ev(50, TraceKind::Die, 2, -1)};
    const auto l = network_lifetime(t, 10, 100);
    EXPECT_DOUBLE_EQ(l.smh, 50.0);
    EXPECT_DOUBLE_EQ(*l.any, 30.0);
}

TEST(EnergyPerBit, Definition)
{
    EXPECT_DOUBLE_EQ(energy_per_bit(12.0, 3, 512), 12.0 / 12288.0);
    EXPECT_DOUBLE_EQ(energy_per_bit(12.0, 3, 512), 9.765625e-4);
    EXPECT_DOUBLE_EQ(energy_per_bit(12.0, 6, 512), energy_per_bit(12.0, 3, 512) / 2.0);
    EXPECT_THROW(energy_per_bit(1.0, 0, 512), NoDeliveries);
}

TEST(MeanOf, EqualsMeanOfReplications)
{
    std::vector<MetricsReport> r(3);
    r[0].delivery_ratio = 0.9;
    r[1].delivery_ratio = 0.6;
    r[2].delivery_ratio = 0.3;
    r[0].mean_e2e_delay = 1.0;
    r[2].mean_e2e_delay = 3.0;
    r[0].lifetime_censored = false;
    const auto m = mean_of(r);
    EXPECT_DOUBLE_EQ(m.delivery_ratio, (0.9 + 0.6 + 0.3) / 3.0);
    EXPECT_DOUBLE_EQ(*m.mean_e2e_delay, 2.0);
    EXPECT_DOUBLE_EQ(m.censored_fraction, 2.0 / 3.0);
    EXPECT_FALSE(m.energy_per_bit.has_value());
    const auto one = mean_of(std::span(r).first(1));
    EXPECT_DOUBLE_EQ(one.delivery_ratio, 0.9);
}
