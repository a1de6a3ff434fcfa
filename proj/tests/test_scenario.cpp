#include "manet/scenario.hpp"

#include <gtest/gtest.h>

using namespace manet;

TEST(Scenario, EmptyFileGivesDefaults)
{
    const auto s = parse_scenario_text("");
    EXPECT_EQ(s.area.width, 1500.0);
    EXPECT_EQ(s.area.height, 500.0);
    EXPECT_EQ(s.queue_capacity, 50u);
    EXPECT_EQ(s.sizes.data, 512);
    EXPECT_EQ(s.p_tx, 1.4);
    EXPECT_EQ(s.p_rx, 1.0);
    EXPECT_EQ(s.energy_smh, 50.0);
    EXPECT_EQ(s.energy_lmh, 100.0);
    EXPECT_EQ(s.mobility_smh.pause, 10.0);
    EXPECT_EQ(s.mobility_smh.v_max, 2.0);
    EXPECT_EQ(s.mobility_lmh.v_max, 20.0);
    EXPECT_EQ(s.total_nodes(), 50);
    EXPECT_EQ(s.duration, 1000.0);
    ASSERT_EQ(s.flows.size(), 1u);
    const auto f = s.resolved(s.flows[0]);
    EXPECT_EQ(f.src, 0);
    EXPECT_EQ(f.dst, 49);
    EXPECT_EQ(f.deadline, 15.0);
    EXPECT_EQ(s.class_of(0), NodeClass::Smh);
    EXPECT_EQ(s.class_of(49), NodeClass::Lmh);
}

TEST(Scenario, CommentsAndWhitespace)
{
    const auto s = parse_scenario_text("# header\n  nodes = 20   # trailing\n\n duration=100\n");
    EXPECT_EQ(s.n_smh, 10);
    EXPECT_EQ(s.n_lmh, 10);
    EXPECT_EQ(s.duration, 100.0);
    EXPECT_EQ(s.resolved(s.flows[0]).stop, 100.0);
}

TEST(Scenario, WeightsOffSimplexNameTheKey)
{
    try
    {
        parse_scenario_text("w_energy = 0.5\nw_queue = 0.3\nw_delay = 0.3\n");
        FAIL() << "accepted weights summing to 1.1";
    }
    catch (const ValidationError &e)
    {
        EXPECT_NE(std::string(e.what()).find("w_"), std::string::npos) << e.what();
    }
}

TEST(Scenario, EnergyPresetLoadsTableWeights)
{
    const auto s = parse_scenario_text("policy = eddsr-energy\n");
    EXPECT_EQ(*s.policy.weights, presets::kEnergyAware);
    EXPECT_EQ(s.qos_for_run().weights, presets::kEnergyAware);
}

TEST(Scenario, TransmitTimeFollowsPacketSize)
{
    EXPECT_NEAR(parse_scenario_text("").qos_for_run().t_transmit, 0.002048, 1e-15);
    EXPECT_NEAR(parse_scenario_text("bitrate = 1000000\n").qos_for_run().t_transmit, 0.004096, 1e-15);
    EXPECT_NEAR(parse_scenario_text("t_transmit = 0.01\n").qos_for_run().t_transmit, 0.01, 1e-15);
}

TEST(Scenario, ExplicitFlows)
{
    const auto s = parse_scenario_text("flow = 0 -1 5 25\nflow = 1 7 2 15 10 20\n");
    ASSERT_EQ(s.flows.size(), 2u);
    EXPECT_EQ(s.flows[0].rate, 5.0);
    EXPECT_EQ(s.flows[0].deadline, 25.0);
    EXPECT_EQ(s.flows[1].dst, 7);
    EXPECT_EQ(s.flows[1].start, 10.0);
    EXPECT_EQ(s.flows[1].stop, 20.0);
}

TEST(Scenario, Errors)
{
    EXPECT_THROW(parse_scenario_text("nodes 20\n"), ParseError);
    EXPECT_THROW(parse_scenario_text("nodes =\n"), ParseError);
    try
    {
        parse_scenario_text("\n\ncolour = blue\n");
        FAIL();
    }
    catch (const ValidationError &e)
    {
        EXPECT_EQ(e.key(), "colour");
    }
    try
    {
        parse_scenario_text("duration = 0\n");
        FAIL();
    }
    catch (const ValidationError &e)
    {
        EXPECT_EQ(e.key(), "duration");
    }
    try
    {
        parse_scenario_text("replications = 0\n");
        FAIL();
    }
    catch (const ValidationError &e)
    {
        EXPECT_EQ(e.key(), "replications");
    }
    EXPECT_THROW(parse_scenario_text("n_smh = 0\n"), ValidationError);
    EXPECT_THROW(parse_scenario_text("policy = aodv\n"), ValidationError);
    EXPECT_THROW(parse_scenario_text("rate = fast\n"), ValidationError);
    EXPECT_THROW(parse_scenario("/nonexistent/file.scn"), MissingFile);
}

TEST(Scenario, ParseErrorCarriesLine)
{
    try
    {
        parse_scenario_text("nodes = 20\n# fine\nbroken line\n");
        FAIL();
    }
    catch (const ParseError &e)
    {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Scenario, ShippedFiles)
{
    const auto paper = parse_scenario(MANET_SCENARIO_DIR "/paper-50n.scn");
    EXPECT_EQ(paper.name, "paper-50n");
    EXPECT_EQ(paper.total_nodes(), 50);
    EXPECT_EQ(paper.duration, 1000.0);
    EXPECT_EQ(paper.energy_smh, 50.0);
    const auto desk = parse_scenario(MANET_SCENARIO_DIR "/desk-20n-100s.scn");
    EXPECT_EQ(desk.total_nodes(), 20);
    EXPECT_EQ(desk.duration, 100.0);
    EXPECT_EQ(desk.flows.front().deadline, 15.0);
}

TEST(Scenario, RtdsrModifier)
{
    EXPECT_TRUE(parse_scenario_text("policy = dsr+rtdsr-admission\n").policy.rtdsr_admission);
    const auto s = parse_scenario_text("rtdsr_admission = true\npolicy = eddsr\n");
    EXPECT_TRUE(s.policy.rtdsr_admission);
}
