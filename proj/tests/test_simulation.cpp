#include "manet/simulation.hpp"

#include <gtest/gtest.h>

#include <map>
#include <sstream>

using namespace manet;

namespace
{
    Scenario desk(const std::string &policy, double rate = 10.0)
    {
        auto s = parse_scenario(MANET_SCENARIO_DIR "/desk-20n-100s.scn");
        s.policy = *parse_policy(policy);
        s.flows.front().rate = rate;
        return s;
    }

    void expect_conservation(const RunResult &r, const Scenario &s)
    {
        std::map<PacketId, int> terminal;
        std::map<PacketId, int> sent;
        const auto n = static_cast<int>(s.flows.size());
        for (const auto &e : r.trace)
        {
            if (e.type != PacketType::Cbr || e.kind == TraceKind::Die) continue;
            if (e.kind == TraceKind::Send) ++sent[e.packet];
            if (e.kind == TraceKind::Drop) ++terminal[e.packet];
            if (e.kind == TraceKind::Recv)
            {
                EXPECT_EQ(e.node, s.resolved(s.flows[static_cast<std::size_t>(cbr_flow_of(e.packet, n))]).dst);
                ++terminal[e.packet];
            }
        }
        EXPECT_EQ(sent.size(), terminal.size());
        for (const auto &[id, count] : sent)
        {
            EXPECT_EQ(count, 1);
            EXPECT_EQ(terminal[id], 1) << "packet " << id;
        }
    }
} // namespace

TEST(Simulation, EnergyLedgerClosesForEveryNode)
{
    for (const char *p : {"dsr", "eddsr"})
    {
        const auto s = desk(p, 20);
        const auto r = run_scenario(s, 3);
        ASSERT_EQ(r.energy.size(), 20u);
        for (const auto &e : r.energy)
        {
            const double expected = s.p_tx * e.tx_time().seconds() + s.p_rx * e.rx_time().seconds();
            EXPECT_NEAR(e.initial() - e.residual(), expected, 1e-9);
        }
    }
}

TEST(Simulation, EveryCbrPacketEndsExactlyOnce)
{
    for (const char *p : {"dsr", "eddsr", "emrp", "alw-video", "eddsr+rtdsr-admission"})
    {
        const auto s = desk(p, 15);
        for (std::uint64_t seed = 1; seed <= 3; ++seed) expect_conservation(run_scenario(s, seed), s);
    }
}

TEST(Simulation, EdDsrNeverHandlesExpiredPackets)
{
    auto s = desk("eddsr", 20);
    s.flows.front().deadline = 0.05; // tight enough that some packets expire
    std::map<PacketId, SimTime> sent;
    std::size_t expired_drops = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
        const auto r = run_scenario(s, seed);
        sent.clear();
        for (const auto &e : r.trace)
        {
            if (e.type != PacketType::Cbr) continue;
            if (e.kind == TraceKind::Send) sent[e.packet] = e.time;
            if (e.kind == TraceKind::Fwd || e.kind == TraceKind::Recv)
            {
                EXPECT_LE(e.time - sent.at(e.packet), SimTime::from_seconds(0.05));
            }
            if (e.kind == TraceKind::Drop && e.reason == DropReason::Expired) ++expired_drops;
        }
        EXPECT_DOUBLE_EQ(r.report.in_time_ratio, r.report.delivery_ratio);
    }
    EXPECT_GT(expired_drops, 0u);
}

TEST(Simulation, DsrDeliversLatePackets)
{
    auto s = desk("dsr", 20);
    s.flows.front().deadline = 0.01;
    const auto r = run_scenario(s, 1);
    EXPECT_LT(r.report.in_time_ratio, r.report.delivery_ratio);
    for (const auto &e : r.trace) EXPECT_FALSE(e.reason == DropReason::Expired && e.type == PacketType::Cbr);
}

TEST(Simulation, SameSeedSameTrace)
{
    const auto s = desk("eddsr");
    const auto a = run_scenario(s, 7), b = run_scenario(s, 7);
    EXPECT_EQ(a.trace, b.trace);
    const auto c = run_scenario(s, 8);
    EXPECT_NE(a.trace, c.trace);
}

TEST(Simulation, PoliciesSeeIdenticalMobility)
{
    const auto a = run_scenario(desk("dsr", 20), 4);
    const auto b = run_scenario(desk("eddsr", 20), 4);
    ASSERT_FALSE(a.mobility.empty());
    EXPECT_EQ(a.mobility, b.mobility);
    EXPECT_NE(a.trace, b.trace);
}

TEST(Simulation, ReportMatchesTraceReadBack)
{
    const auto s = desk("eddsr", 15);
    const auto r = run_scenario(s, 2);
    std::stringstream ss;
    write_trace(ss, r.trace);
    const auto back = read_trace(ss);
    const auto again = compute_report(back, metrics_context(s, r.energy_consumed()));
    EXPECT_NEAR(again.delivery_ratio, r.report.delivery_ratio, 1e-9);
    EXPECT_NEAR(again.in_time_ratio, r.report.in_time_ratio, 1e-9);
    EXPECT_NEAR(*again.mean_e2e_delay, *r.report.mean_e2e_delay, 1e-9);
    EXPECT_NEAR(again.lifetime_smh, r.report.lifetime_smh, 1e-9);
    EXPECT_NEAR(*again.energy_per_bit, *r.report.energy_per_bit, 1e-9);
}

TEST(Simulation, FloodingIsBounded)
{
    const auto s = desk("dsr");
    const auto r = run_scenario(s, 5);
    ASSERT_GT(r.stats.discoveries, 0);
    EXPECT_LE(r.stats.rreq_transmissions, r.stats.discoveries * s.total_nodes());
}

TEST(Simulation, SingleHopDelayIsProcessingPlusTransmission)
{
    // every node within range of every other: after discovery the route is direct
    auto s = parse_scenario_text("nodes = 6\narea_width = 100\narea_height = 100\nduration = 10\npolicy = dsr\n");
    const auto r = run_scenario(s, 1);
    std::map<PacketId, SimTime> sent;
    SimTime min_delay = SimTime::max();
    for (const auto &e : r.trace)
    {
        if (e.type != PacketType::Cbr) continue;
        if (e.kind == TraceKind::Send) sent[e.packet] = e.time;
        if (e.kind == TraceKind::Recv) min_delay = std::min(min_delay, e.time - sent.at(e.packet));
        EXPECT_NE(e.kind, TraceKind::Fwd);
    }
    EXPECT_EQ(min_delay.micros(), 5000 + 2048);
    EXPECT_DOUBLE_EQ(r.report.delivery_ratio, 1.0);
}

TEST(Simulation, DeadNodesFallSilent)
{
    auto s = desk("dsr", 20);
    s.energy_smh = 0.5;
    s.energy_lmh = 1.0;
    const auto r = run_scenario(s, 1);
    std::map<NodeId, SimTime> died;
    for (const auto &e : r.trace)
    {
        if (e.kind == TraceKind::Die)
        {
            EXPECT_FALSE(died.contains(e.node));
            died[e.node] = e.time;
            continue;
        }
        if (auto it = died.find(e.node); it != died.end() && e.kind != TraceKind::Drop)
        {
            ADD_FAILURE() << "node " << e.node << " active after death: " << format_trace_line(e);
        }
    }
    ASSERT_FALSE(died.empty());
    EXPECT_FALSE(r.report.lifetime_censored);
    for (const auto &e : r.energy) EXPECT_LT(e.ledger_error(), 1e-9);
    expect_conservation(r, s);
}

TEST(Simulation, PaperScaleRunCompletes)
{
    auto s = parse_scenario(MANET_SCENARIO_DIR "/paper-50n.scn");
    const auto r = run_scenario(s, 1);
    EXPECT_EQ(r.report.counts.generated, 10'000);
    EXPECT_GT(r.report.delivery_ratio, 0.5);
    EXPECT_LE(r.report.in_time_ratio, r.report.delivery_ratio);
}
