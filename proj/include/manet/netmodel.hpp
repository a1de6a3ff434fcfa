#pragma once

// Unit-disk radio, per-node energy accounting and the bounded node queue.

#include "manet/engine.hpp"
#include "manet/mobility.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace manet
{
    struct LinkParams
    {
        double range = 250.0;       // metres, closed disk
        double bitrate = 2'000'000; // bits/s

        /// Transmission time, rounded up to the microsecond.
        SimTime t_tx(int bytes) const { return SimTime::ceil_seconds(bytes * 8.0 / bitrate); }

        bool in_range(Vec2 a, Vec2 b) const noexcept { return distance(a, b) <= range; }
    };

    /// Battery of one node. Energy is only ever drawn, never restored; the
    /// accumulated radio-on durations are kept so that the ledger can be
    /// audited against the residual.
    class EnergyState
    {
    public:
        EnergyState() = default;
        EnergyState(double initial_j, double p_tx_w, double p_rx_w)
            : initial_(initial_j), residual_(initial_j), p_tx_(p_tx_w), p_rx_(p_rx_w)
        {
        }

        double initial() const noexcept { return initial_; }
        double residual() const noexcept { return residual_; }
        double consumed() const noexcept { return initial_ - residual_; }
        double p_tx() const noexcept { return p_tx_; }
        double p_rx() const noexcept { return p_rx_; }
        SimTime tx_time() const noexcept { return tx_time_; }
        SimTime rx_time() const noexcept { return rx_time_; }
        bool has_energy() const noexcept { return residual_ > 0.0; }

        /// Returns true if this draw exhausted the battery.
        bool charge_tx(SimTime d) { return draw(p_tx_ * d.seconds(), tx_time_, d); }
        bool charge_rx(SimTime d) { return draw(p_rx_ * d.seconds(), rx_time_, d); }

        /// |consumed − (p_tx·t_tx + p_rx·t_rx)|; zero up to rounding.
        double ledger_error() const noexcept
        {
            return std::abs(consumed() - (p_tx_ * tx_time_.seconds() + p_rx_ * rx_time_.seconds()));
        }

    private:
        bool draw(double joules, SimTime &acc, SimTime d)
        {
            const bool was_alive = residual_ > 0.0;
            residual_ -= joules;
            acc += d;
            return was_alive && residual_ <= 0.0;
        }

        double initial_ = 0.0;
        double residual_ = 0.0;
        double p_tx_ = 1.4;
        double p_rx_ = 1.0;
        SimTime tx_time_{};
        SimTime rx_time_{};
    };

    enum class EnqueueResult : std::uint8_t
    {
        Accepted,
        Dropped,
    };

    /// Drop-tail queue with two priority classes: control items are served
    /// before data items, each class FIFO. Capacity bounds the total length.
    template <class T>
    class NodeQueue
    {
    public:
        explicit NodeQueue(std::size_t capacity = 50) : capacity_(capacity) {}

        std::size_t capacity() const noexcept { return capacity_; }
        std::size_t size() const noexcept { return control_.size() + data_.size(); }
        bool empty() const noexcept { return size() == 0; }
        bool full() const noexcept { return size() >= capacity_; }

        EnqueueResult enqueue(T item, bool control)
        {
            if (full())
            {
                return EnqueueResult::Dropped;
            }
            (control ? control_ : data_).push_back(std::move(item));
            ++accepted_;
            return EnqueueResult::Accepted;
        }

        std::optional<T> pop()
        {
            auto &q = control_.empty() ? data_ : control_;
            if (q.empty())
            {
                return std::nullopt;
            }
            T item = std::move(q.front());
            q.pop_front();
            ++dequeued_;
            return item;
        }

        /// Removes everything, control class first.
        std::vector<T> drain()
        {
            std::vector<T> out;
            out.reserve(size());
            while (auto item = pop())
            {
                out.push_back(std::move(*item));
            }
            return out;
        }

        /// Visits queued items in service order.
        template <class F> void for_each(F &&f) const
        {
            for (const auto &item : control_) f(item);
            for (const auto &item : data_) f(item);
        }

        std::size_t accepted() const noexcept { return accepted_; }
        std::size_t dequeued() const noexcept { return dequeued_; }

    private:
        std::size_t capacity_;
        std::deque<T> control_;
        std::deque<T> data_;
        std::size_t accepted_ = 0;
        std::size_t dequeued_ = 0;
    };

    /// All nodes j != self that are alive and within the closed radio disk.
    inline std::vector<NodeId> neighbors(NodeId self, std::span<const Vec2> positions,
                                         const std::function<bool(NodeId)> &alive, const LinkParams &link)
    {
        std::vector<NodeId> out;
        const auto me = positions[static_cast<std::size_t>(self)];
        for (std::size_t j = 0; j < positions.size(); ++j)
        {
            const auto id = static_cast<NodeId>(j);
            if (id != self && alive(id) && link.in_range(me, positions[j]))
            {
                out.push_back(id);
            }
        }
        return out;
    }
} // namespace manet
