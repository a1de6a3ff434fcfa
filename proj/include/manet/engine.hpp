#pragma once

// Deterministic discrete-event core: integer-microsecond clock, a (time, seq)
// ordered event queue with lazy cancellation, and labelled RNG streams.

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace manet
{
    /// Simulation time in whole microseconds. Every timestamp the simulator
    /// produces is representable exactly with six decimals in the trace.
    class SimTime
    {
    public:
        constexpr SimTime() = default;

        static constexpr SimTime from_micros(std::int64_t us) noexcept { return SimTime{us}; }

        /// Rounds to the nearest microsecond.
        static SimTime from_seconds(double s) { return SimTime{static_cast<std::int64_t>(std::llround(s * 1e6))}; }

        /// Rounds up to the next microsecond (used for durations that must not be shortened).
        static SimTime ceil_seconds(double s)
        {
            const double us = s * 1e6;
            const double r = std::round(us);
            // values within float noise of an integer are taken as that integer
            if (std::abs(us - r) < 1e-6)
            {
                return SimTime{static_cast<std::int64_t>(r)};
            }
            return SimTime{static_cast<std::int64_t>(std::ceil(us))};
        }

        static constexpr SimTime max() noexcept { return SimTime{std::numeric_limits<std::int64_t>::max()}; }

        constexpr std::int64_t micros() const noexcept { return us_; }
        constexpr double seconds() const noexcept { return static_cast<double>(us_) / 1e6; }

        constexpr auto operator<=>(const SimTime &) const noexcept = default;

        constexpr SimTime operator+(SimTime o) const noexcept { return SimTime{us_ + o.us_}; }
        constexpr SimTime operator-(SimTime o) const noexcept { return SimTime{us_ - o.us_}; }
        constexpr SimTime &operator+=(SimTime o) noexcept
        {
            us_ += o.us_;
            return *this;
        }

    private:
        constexpr explicit SimTime(std::int64_t us) : us_(us) {}
        std::int64_t us_ = 0;
    };

    enum class EventKind : std::uint8_t
    {
        PacketArrival,
        QueueService,
        WaypointReached,
        PauseEnd,
        CbrSend,
        RrepWindowClose,
        NodeDeath,
        SimEnd,
    };

    class PastTimeError : public std::logic_error
    {
    public:
        PastTimeError(SimTime requested, SimTime clock)
            : std::logic_error("event scheduled at " + std::to_string(requested.seconds()) +
                               " s is before the clock (" + std::to_string(clock.seconds()) + " s)")
        {
        }
    };

    using EventHandle = std::uint64_t;

    template <class Payload>
    struct SimEvent
    {
        SimTime fire_time;
        std::uint64_t seq = 0;
        EventKind kind = EventKind::SimEnd;
        Payload payload{};
    };

    /// Single-threaded event queue. Events fire in nondecreasing (fire_time, seq)
    /// order; simultaneous events keep their insertion order.
    template <class Payload>
    class Scheduler
    {
    public:
        using Event = SimEvent<Payload>;

        SimTime now() const noexcept { return clock_; }
        std::size_t pending() const noexcept { return heap_.size() - cancelled_.size(); }
        bool empty() const noexcept { return pending() == 0; }

        EventHandle schedule(SimTime at, EventKind kind, Payload payload = {})
        {
            if (at < clock_)
            {
                throw PastTimeError(at, clock_);
            }
            const auto seq = next_seq_++;
            heap_.push_back(Event{at, seq, kind, std::move(payload)});
            std::push_heap(heap_.begin(), heap_.end(), later);
            return seq;
        }

        EventHandle schedule_in(SimTime delay, EventKind kind, Payload payload = {})
        {
            return schedule(clock_ + delay, kind, std::move(payload));
        }

        /// Tombstones the event; it is discarded when it reaches the front.
        /// Cancelling an already-fired or unknown handle is a no-op.
        void cancel(EventHandle h)
        {
            if (h < next_seq_ && is_queued(h))
            {
                cancelled_.insert(h);
            }
        }

        /// Processes every event with fire_time <= t_end through `handler`
        /// (called as handler(Event&&)), then advances the clock to t_end.
        template <class Handler>
        std::size_t run_until(SimTime t_end, Handler &&handler)
        {
            std::size_t processed = 0;
            while (!heap_.empty() && heap_.front().fire_time <= t_end)
            {
                std::pop_heap(heap_.begin(), heap_.end(), later);
                Event ev = std::move(heap_.back());
                heap_.pop_back();
                if (auto it = cancelled_.find(ev.seq); it != cancelled_.end())
                {
                    cancelled_.erase(it);
                    continue;
                }
                clock_ = ev.fire_time;
                ++processed;
                handler(std::move(ev));
            }
            if (t_end > clock_)
            {
                clock_ = t_end;
            }
            return processed;
        }

        /// Visits queued (non-cancelled) events in unspecified order.
        template <class Visitor>
        void for_each_pending(Visitor &&visit) const
        {
            for (const auto &ev : heap_)
            {
                if (!cancelled_.contains(ev.seq))
                {
                    visit(ev);
                }
            }
        }

    private:
        static bool later(const Event &a, const Event &b) noexcept
        {
            if (a.fire_time != b.fire_time)
            {
                return a.fire_time > b.fire_time;
            }
            return a.seq > b.seq;
        }

        bool is_queued(EventHandle h) const
        {
            return std::any_of(heap_.begin(), heap_.end(), [h](const Event &e) { return e.seq == h; });
        }

        std::vector<Event> heap_;
        std::unordered_set<std::uint64_t> cancelled_;
        SimTime clock_{};
        std::uint64_t next_seq_ = 0;
    };

    namespace detail
    {
        inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
        {
            x += 0x9E3779B97F4A7C15ULL;
            x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
            x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
            return x ^ (x >> 31);
        }

        inline constexpr std::uint64_t fnv1a(std::string_view s) noexcept
        {
            std::uint64_t h = 0xCBF29CE484222325ULL;
            for (unsigned char c : s)
            {
                h ^= c;
                h *= 0x100000001B3ULL;
            }
            return h;
        }
    } // namespace detail

    /// Pseudo-random stream keyed by (master seed, label). Two streams with the
    /// same key produce the same sequence on every platform: draws avoid the
    /// implementation-defined std distributions.
    class RngStream
    {
    public:
        RngStream(std::uint64_t master_seed, std::string label)
            : label_(std::move(label)),
              engine_(detail::splitmix64(master_seed ^ detail::splitmix64(detail::fnv1a(label_))))
        {
        }

        const std::string &label() const noexcept { return label_; }

        std::uint64_t next_u64() { return engine_(); }

        /// Uniform in [0, 1) with 53 bits of precision.
        double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

        /// Uniform in [lo, hi).
        double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    private:
        std::string label_;
        std::mt19937_64 engine_;
    };

    /// Replication r of a batch runs with seed base + r.
    inline constexpr std::uint64_t replication_seed(std::uint64_t base_seed, std::uint32_t replication) noexcept
    {
        return base_seed + replication;
    }
} // namespace manet
