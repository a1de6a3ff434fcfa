#pragma once

// Random waypoint movement inside a rectangular area.

#include "manet/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace manet
{
    using NodeId = std::int32_t;

    struct Vec2
    {
        double x = 0.0;
        double y = 0.0;

        friend bool operator==(const Vec2 &, const Vec2 &) = default;
    };

    inline double distance(Vec2 a, Vec2 b) noexcept { return std::hypot(a.x - b.x, a.y - b.y); }

    struct Area
    {
        double width = 1500.0;
        double height = 500.0;

        bool contains(Vec2 p) const noexcept { return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height; }
    };

    enum class NodeClass : std::uint8_t
    {
        Smh,
        Lmh,
    };

    /// Per-class movement parameters. Speeds of each leg are uniform in [v_min, v_max].
    struct MobilityParams
    {
        double v_min = 0.1;
        double v_max = 2.0;
        double pause = 10.0;

        static MobilityParams smh() { return {0.1, 2.0, 10.0}; }
        static MobilityParams lmh() { return {0.1, 20.0, 0.0}; }
    };

    enum class MovePhase : std::uint8_t
    {
        Moving,
        Paused,
    };

    struct WaypointState
    {
        Vec2 origin;
        Vec2 destination;
        double speed = 0.0;
        double depart_time = 0.0;
        MovePhase phase = MovePhase::Moving;
        double pause_until = 0.0;

        double leg_length() const noexcept { return distance(origin, destination); }

        /// Time at which the current leg ends (for Paused: end of the pause).
        double leg_end() const noexcept
        {
            if (phase == MovePhase::Paused)
            {
                return pause_until;
            }
            return speed > 0.0 ? depart_time + leg_length() / speed : depart_time;
        }
    };

    inline Vec2 random_point(const Area &area, RngStream &rng)
    {
        const double x = rng.uniform() * area.width;
        const double y = rng.uniform() * area.height;
        return {x, y};
    }

    inline double random_speed(const MobilityParams &p, RngStream &rng)
    {
        // uniform() < 1 so the draw stays in [v_min, v_max); v_min > 0 keeps it off zero
        return p.v_min + (p.v_max - p.v_min) * rng.uniform();
    }

    /// Starts `depart_time` at `t0` from a uniform random position.
    inline WaypointState init_waypoint(const Area &area, const MobilityParams &params, RngStream &rng,
                                       double t0 = 0.0)
    {
        WaypointState s;
        s.origin = random_point(area, rng);
        s.destination = random_point(area, rng);
        s.speed = random_speed(params, rng);
        s.depart_time = t0;
        s.phase = MovePhase::Moving;
        s.pause_until = t0;
        return s;
    }

    inline Vec2 position_at(const WaypointState &s, double t) noexcept
    {
        if (s.phase == MovePhase::Paused)
        {
            return s.origin;
        }
        const double len = s.leg_length();
        if (len <= 0.0 || s.speed <= 0.0)
        {
            return s.destination;
        }
        const double travelled = std::max(0.0, t - s.depart_time) * s.speed;
        if (travelled >= len)
        {
            return s.destination;
        }
        const double f = travelled / len;
        return {s.origin.x + f * (s.destination.x - s.origin.x), s.origin.y + f * (s.destination.y - s.origin.y)};
    }

    /// Called when the node arrives at its destination at time `t`. With a
    /// positive pause the node holds position until t + pause; otherwise it
    /// departs immediately on a fresh leg.
    inline WaypointState on_waypoint_reached(const WaypointState &s, double t, const Area &area,
                                             const MobilityParams &params, RngStream &rng)
    {
        WaypointState next;
        next.origin = s.destination;
        if (params.pause > 0.0)
        {
            next.destination = s.destination;
            next.phase = MovePhase::Paused;
            next.depart_time = t;
            next.pause_until = t + params.pause;
            return next;
        }
        next.destination = random_point(area, rng);
        next.speed = random_speed(params, rng);
        next.depart_time = t;
        next.pause_until = t;
        next.phase = MovePhase::Moving;
        return next;
    }

    /// Called at the end of a pause: draw a new destination and speed.
    inline WaypointState on_pause_end(const WaypointState &s, double t, const Area &area,
                                      const MobilityParams &params, RngStream &rng)
    {
        WaypointState next;
        next.origin = s.origin;
        next.destination = random_point(area, rng);
        next.speed = random_speed(params, rng);
        next.depart_time = t;
        next.pause_until = t;
        next.phase = MovePhase::Moving;
        return next;
    }
} // namespace manet
