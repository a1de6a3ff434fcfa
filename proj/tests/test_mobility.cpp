#include "manet/mobility.hpp"

#include <gtest/gtest.h>

using namespace manet;

namespace
{
    const Area kArea{1500.0, 500.0};

    /// Follows a node through `legs` waypoint/pause transitions.
    template <class F>
    void walk(const MobilityParams &p, std::uint64_t seed, int legs, F &&on_state)
    {
        RngStream rng(seed, "walk");
        auto s = init_waypoint(kArea, p, rng);
        on_state(s);
        for (int i = 0; i < legs; ++i)
        {
            const double t = s.leg_end();
            s = s.phase == MovePhase::Paused ? on_pause_end(s, t, kArea, p, rng) : on_waypoint_reached(s, t, kArea, p, rng);
            on_state(s);
        }
    }
} // namespace

TEST(Mobility, InitialPositionInsideArea)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        RngStream rng(seed, "init");
        const auto s = init_waypoint(kArea, MobilityParams::smh(), rng);
        EXPECT_TRUE(kArea.contains(s.origin));
        EXPECT_TRUE(kArea.contains(s.destination));
        EXPECT_EQ(s.phase, MovePhase::Moving);
    }
}

TEST(Mobility, ClassSpeedLimits)
{
    for (std::uint64_t seed = 0; seed < 200; ++seed)
    {
        RngStream a(seed, "smh"), b(seed, "lmh");
        const auto smh = init_waypoint(kArea, MobilityParams::smh(), a);
        const auto lmh = init_waypoint(kArea, MobilityParams::lmh(), b);
        EXPECT_GT(smh.speed, 0.0);
        EXPECT_LE(smh.speed, 2.0);
        EXPECT_GT(lmh.speed, 0.0);
        EXPECT_LE(lmh.speed, 20.0);
    }
}

TEST(Mobility, DefaultClassParameters)
{
    EXPECT_DOUBLE_EQ(MobilityParams::smh().v_max, 2.0);
    EXPECT_DOUBLE_EQ(MobilityParams::smh().pause, 10.0);
    EXPECT_DOUBLE_EQ(MobilityParams::lmh().v_max, 20.0);
    EXPECT_DOUBLE_EQ(MobilityParams::lmh().pause, 0.0);
    EXPECT_DOUBLE_EQ(MobilityParams::smh().v_min, 0.1);
}

TEST(Mobility, InterpolatesAlongLeg)
{
    WaypointState s;
    s.origin = {0, 0};
    s.destination = {300, 400};
    s.speed = 2.0;
    s.depart_time = 10.0;
    const auto mid = position_at(s, 10.0 + 125.0);
    EXPECT_DOUBLE_EQ(mid.x, 150.0);
    EXPECT_DOUBLE_EQ(mid.y, 200.0);
    EXPECT_EQ(position_at(s, 10.0 + 500.0 / 2.0), s.destination);
    EXPECT_EQ(position_at(s, 1e6), s.destination);
    EXPECT_EQ(position_at(s, 10.0), s.origin);
}

TEST(Mobility, PausedNodeStaysPut)
{
    WaypointState s;
    s.origin = s.destination = {100, 100};
    s.phase = MovePhase::Paused;
    s.depart_time = 5.0;
    s.pause_until = 15.0;
    for (double t = 5.0; t <= 15.0; t += 0.5) EXPECT_EQ(position_at(s, t), s.origin);
}

TEST(Mobility, SmhPausesTenSeconds)
{
    RngStream rng(1, "p");
    WaypointState s;
    s.origin = {0, 0};
    s.destination = {10, 0};
    s.speed = 1.0;
    const auto next = on_waypoint_reached(s, 100.0, kArea, MobilityParams::smh(), rng);
    EXPECT_EQ(next.phase, MovePhase::Paused);
    EXPECT_DOUBLE_EQ(next.pause_until, 110.0);
    EXPECT_EQ(next.origin, s.destination);
    EXPECT_DOUBLE_EQ(next.leg_end(), 110.0);

    const auto after = on_pause_end(next, 110.0, kArea, MobilityParams::smh(), rng);
    EXPECT_EQ(after.phase, MovePhase::Moving);
    EXPECT_EQ(after.origin, s.destination);
    EXPECT_TRUE(kArea.contains(after.destination));
    EXPECT_DOUBLE_EQ(after.depart_time, 110.0);
}

TEST(Mobility, LmhKeepsMoving)
{
    RngStream rng(1, "l");
    WaypointState s;
    s.destination = {20, 20};
    const auto next = on_waypoint_reached(s, 50.0, kArea, MobilityParams::lmh(), rng);
    EXPECT_EQ(next.phase, MovePhase::Moving);
    EXPECT_DOUBLE_EQ(next.depart_time, 50.0);
    EXPECT_EQ(next.origin, s.destination);
}

TEST(Mobility, TrajectoriesStayInsideAndContinuous)
{
    for (const auto &p : {MobilityParams::smh(), MobilityParams::lmh()})
    {
        walk(p, 9, 200, [&](const WaypointState &s) {
            EXPECT_LE(s.speed, p.v_max);
            const double t0 = s.depart_time;
            const double t1 = s.leg_end();
            const double step = std::max((t1 - t0) / 50.0, 1e-3);
            Vec2 prev = position_at(s, t0);
            for (double t = t0 + step; t <= t1; t += step)
            {
                const auto q = position_at(s, t);
                EXPECT_TRUE(kArea.contains(q));
                EXPECT_LE(distance(prev, q), p.v_max * step + 1e-9);
                prev = q;
            }
        });
    }
}

TEST(Mobility, LegsJoinWithoutJumps)
{
    const auto p = MobilityParams::smh();
    WaypointState prev;
    bool first = true;
    walk(p, 4, 100, [&](const WaypointState &s) {
        if (!first)
        {
            EXPECT_LT(distance(position_at(prev, prev.leg_end()), position_at(s, s.depart_time)), 1e-9);
        }
        prev = s;
        first = false;
    });
}

TEST(Mobility, FixedStreamRepeats)
{
    std::vector<Vec2> a, b;
    walk(MobilityParams::lmh(), 11, 50, [&](const WaypointState &s) { a.push_back(s.destination); });
    walk(MobilityParams::lmh(), 11, 50, [&](const WaypointState &s) { b.push_back(s.destination); });
    EXPECT_EQ(a, b);
}
