#pragma once

// Scenario description and the flat `key = value` file format. Keys left
// unset keep the defaults below (a 1500 m × 500 m area, 50-slot queues,
// 512-byte packets, 1.4 W / 1.0 W radios, 50 J / 100 J batteries, 10 s pauses
// for small hosts).

#include "manet/mobility.hpp"
#include "manet/netmodel.hpp"
#include "manet/packets.hpp"
#include "manet/qos.hpp"
#include "manet/routing.hpp"
#include "manet/traffic.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manet
{
    class MissingFile : public std::runtime_error
    {
    public:
        explicit MissingFile(const std::string &path) : std::runtime_error("cannot open scenario file: " + path) {}
    };

    class ParseError : public std::runtime_error
    {
    public:
        ParseError(std::size_t line, const std::string &what)
            : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line)
        {
        }
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    class ValidationError : public std::invalid_argument
    {
    public:
        ValidationError(std::string key, const std::string &reason)
            : std::invalid_argument(key + ": " + reason), key_(std::move(key))
        {
        }
        const std::string &key() const noexcept { return key_; }

    private:
        std::string key_;
    };

    struct Scenario
    {
        std::string name = "scenario";
        Area area{1500.0, 500.0};
        int n_smh = 25;
        int n_lmh = 25;
        double energy_smh = 50.0;
        double energy_lmh = 100.0;
        double p_tx = 1.4;
        double p_rx = 1.0;
        LinkParams link;
        MobilityParams mobility_smh = MobilityParams::smh();
        MobilityParams mobility_lmh = MobilityParams::lmh();
        std::size_t queue_capacity = 50;
        PacketSizes sizes;
        Policy policy = *parse_policy("eddsr");
        QosConfig qos;
        bool t_transmit_set = false;
        RoutingParams routing;
        std::vector<CbrFlow> flows{CbrFlow{}};
        double duration = 1000.0;
        std::uint32_t replications = 5;
        std::uint64_t base_seed = 1;

        int total_nodes() const noexcept { return n_smh + n_lmh; }
        NodeClass class_of(NodeId id) const noexcept { return id < n_smh ? NodeClass::Smh : NodeClass::Lmh; }
        const MobilityParams &mobility_of(NodeId id) const noexcept
        {
            return class_of(id) == NodeClass::Smh ? mobility_smh : mobility_lmh;
        }
        double initial_energy(NodeId id) const noexcept
        {
            return class_of(id) == NodeClass::Smh ? energy_smh : energy_lmh;
        }

        /// Flow with negative endpoints resolved (-1 = last node) and stop
        /// clipped to the run length.
        CbrFlow resolved(const CbrFlow &f) const
        {
            CbrFlow r = f;
            if (r.src < 0) r.src = total_nodes() + r.src;
            if (r.dst < 0) r.dst = total_nodes() + r.dst;
            if (r.stop < 0.0 || r.stop > duration) r.stop = duration;
            r.packet_size = sizes.data;
            return r;
        }

        /// Cost parameters the policy actually uses, with T_T derived from the
        /// data packet size unless given explicitly.
        QosConfig qos_for_run() const
        {
            QosConfig q = effective_qos(policy, qos);
            if (!t_transmit_set)
            {
                q.t_transmit = link.t_tx(sizes.data).seconds();
            }
            return q;
        }

        ScoringContext scoring() const
        {
            ScoringContext c;
            c.qos = qos_for_run();
            c.p_tx = p_tx;
            c.p_rx = p_rx;
            c.bitrate = link.bitrate;
            c.reply_window = routing.reply_window;
            c.max_energy = std::max(energy_smh, energy_lmh);
            return c;
        }

        void validate() const
        {
            auto need = [](bool ok, const char *key, const char *why) {
                if (!ok) throw ValidationError(key, why);
            };
            need(area.width > 0.0, "area_width", "must be positive");
            need(area.height > 0.0, "area_height", "must be positive");
            need(n_smh > 0, "n_smh", "must be positive");
            need(n_lmh > 0, "n_lmh", "must be positive");
            need(energy_smh > 0.0, "energy_smh", "must be positive");
            need(energy_lmh > 0.0, "energy_lmh", "must be positive");
            need(p_tx >= 0.0, "p_tx", "must be non-negative");
            need(p_rx >= 0.0, "p_rx", "must be non-negative");
            need(link.range > 0.0, "range", "must be positive");
            need(link.bitrate > 0.0, "bitrate", "must be positive");
            for (auto [m, key] : {std::pair{&mobility_smh, "v_max_smh"}, std::pair{&mobility_lmh, "v_max_lmh"}})
            {
                need(m->v_min > 0.0, "v_min", "must be positive");
                need(m->v_max >= m->v_min, key, "must be at least v_min");
                need(m->pause >= 0.0, key == std::string_view("v_max_smh") ? "pause_smh" : "pause_lmh", "must be non-negative");
            }
            need(queue_capacity > 0, "queue_capacity", "must be positive");
            need(sizes.data > 0, "packet_size", "must be positive");
            need(routing.reply_window > 0.0, "reply_window", "must be positive");
            need(routing.cache_lifetime > 0.0, "cache_lifetime", "must be positive");
            need(routing.send_buffer > 0, "send_buffer", "must be positive");
            need(duration > 0.0, "duration", "must be positive");
            need(replications >= 1, "replications", "must be at least 1");
            need(!flows.empty(), "flow", "at least one flow is required");
            try
            {
                qos_for_run().validate();
            }
            catch (const WeightSumError &e)
            {
                throw ValidationError("w_energy", e.what());
            }
            catch (const std::invalid_argument &e)
            {
                throw ValidationError("alpha", e.what());
            }
            for (const auto &f : flows)
            {
                const auto r = resolved(f);
                need(r.src >= 0 && r.src < total_nodes(), "flow_src", "node id out of range");
                need(r.dst >= 0 && r.dst < total_nodes(), "flow_dst", "node id out of range");
                need(r.src != r.dst, "flow_dst", "source and destination must differ");
                need(r.rate > 0.0, "rate", "must be positive");
                need(r.deadline > 0.0, "deadline", "must be positive");
                need(r.start >= 0.0, "flow_start", "must be non-negative");
            }
        }
    };

    namespace detail
    {
        inline std::string_view trim(std::string_view s)
        {
            const auto b = s.find_first_not_of(" \t\r");
            if (b == std::string_view::npos)
            {
                return {};
            }
            const auto e = s.find_last_not_of(" \t\r");
            return s.substr(b, e - b + 1);
        }

        inline double to_double(const std::string &key, std::string_view v)
        {
            try
            {
                std::size_t used = 0;
                const std::string s(v);
                const double d = std::stod(s, &used);
                if (used != s.size())
                {
                    throw ValidationError(key, "not a number: '" + s + "'");
                }
                return d;
            }
            catch (const std::logic_error &)
            {
                throw ValidationError(key, "not a number: '" + std::string(v) + "'");
            }
        }

        inline long long to_int(const std::string &key, std::string_view v)
        {
            long long x = 0;
            auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
            if (ec != std::errc{} || p != v.data() + v.size())
            {
                throw ValidationError(key, "not an integer: '" + std::string(v) + "'");
            }
            return x;
        }

        inline bool to_bool(const std::string &key, std::string_view v)
        {
            if (v == "true" || v == "1" || v == "yes") return true;
            if (v == "false" || v == "0" || v == "no") return false;
            throw ValidationError(key, "not a boolean: '" + std::string(v) + "'");
        }

        inline std::vector<std::string_view> split(std::string_view s, char sep)
        {
            std::vector<std::string_view> out;
            std::size_t pos = 0;
            while (true)
            {
                const auto next = s.find(sep, pos);
                auto part = trim(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
                if (!part.empty())
                {
                    out.push_back(part);
                }
                if (next == std::string_view::npos)
                {
                    break;
                }
                pos = next + 1;
            }
            return out;
        }
    } // namespace detail

    /// Applies one `key = value` assignment. Unknown keys are rejected.
    inline void set_scenario_key(Scenario &s, const std::string &key, std::string_view value)
    {
        using namespace detail;
        auto num = [&] { return to_double(key, value); };
        auto integer = [&] { return to_int(key, value); };
        auto all_flows = [&](auto &&fn) {
            for (auto &f : s.flows) fn(f);
        };

        if (key == "name") s.name = std::string(value);
        else if (key == "area_width") s.area.width = num();
        else if (key == "area_height") s.area.height = num();
        else if (key == "n_smh") s.n_smh = static_cast<int>(integer());
        else if (key == "n_lmh") s.n_lmh = static_cast<int>(integer());
        else if (key == "nodes")
        {
            const auto n = static_cast<int>(integer());
            if (n < 2) throw ValidationError(key, "needs at least 2 nodes");
            s.n_smh = n / 2;
            s.n_lmh = n - n / 2;
        }
        else if (key == "energy_smh") s.energy_smh = num();
        else if (key == "energy_lmh") s.energy_lmh = num();
        else if (key == "p_tx") s.p_tx = num();
        else if (key == "p_rx") s.p_rx = num();
        else if (key == "range") s.link.range = num();
        else if (key == "bitrate") s.link.bitrate = num();
        else if (key == "v_min")
        {
            s.mobility_smh.v_min = num();
            s.mobility_lmh.v_min = s.mobility_smh.v_min;
        }
        else if (key == "v_max_smh") s.mobility_smh.v_max = num();
        else if (key == "v_max_lmh") s.mobility_lmh.v_max = num();
        else if (key == "pause_smh") s.mobility_smh.pause = num();
        else if (key == "pause_lmh") s.mobility_lmh.pause = num();
        else if (key == "queue_capacity")
        {
            const auto q = integer();
            if (q <= 0) throw ValidationError(key, "must be positive");
            s.queue_capacity = static_cast<std::size_t>(q);
        }
        else if (key == "send_buffer")
        {
            const auto q = integer();
            if (q <= 0) throw ValidationError(key, "must be positive");
            s.routing.send_buffer = static_cast<std::size_t>(q);
        }
        else if (key == "packet_size") s.sizes.data = static_cast<int>(integer());
        else if (key == "rreq_bytes") s.sizes.rreq_base = static_cast<int>(integer());
        else if (key == "rreq_bytes_per_node") s.sizes.rreq_per_node = static_cast<int>(integer());
        else if (key == "rrep_bytes") s.sizes.rrep_base = static_cast<int>(integer());
        else if (key == "rrep_bytes_per_stamp") s.sizes.rrep_per_stamp = static_cast<int>(integer());
        else if (key == "rerr_bytes") s.sizes.rerr = static_cast<int>(integer());
        else if (key == "policy")
        {
            auto p = parse_policy(value);
            if (!p) throw ValidationError(key, "unknown policy '" + std::string(value) + "'");
            const bool rt = s.policy.rtdsr_admission && !p->rtdsr_admission;
            s.policy = *p;
            s.policy.rtdsr_admission = s.policy.rtdsr_admission || rt;
        }
        else if (key == "rtdsr_admission") s.policy.rtdsr_admission = to_bool(key, value);
        else if (key == "alpha") s.qos.alpha = num();
        else if (key == "beta") s.qos.beta = num();
        else if (key == "gamma") s.qos.gamma = num();
        else if (key == "w_energy" || key == "w_queue" || key == "w_delay")
        {
            const double w = num();
            if (key == "w_energy") s.qos.weights.energy = w;
            else if (key == "w_queue") s.qos.weights.queue = w;
            else s.qos.weights.delay = w;
            s.qos.scale = 1.0;
        }
        else if (key == "t_local") s.qos.t_local = num();
        else if (key == "t_transmit")
        {
            s.qos.t_transmit = num();
            s.t_transmit_set = true;
        }
        else if (key == "reply_window") s.routing.reply_window = num();
        else if (key == "cache_lifetime") s.routing.cache_lifetime = num();
        else if (key == "rate") all_flows([&](CbrFlow &f) { f.rate = num(); });
        else if (key == "deadline") all_flows([&](CbrFlow &f) { f.deadline = num(); });
        else if (key == "flow_src") all_flows([&](CbrFlow &f) { f.src = static_cast<NodeId>(integer()); });
        else if (key == "flow_dst") all_flows([&](CbrFlow &f) { f.dst = static_cast<NodeId>(integer()); });
        else if (key == "flow_start") all_flows([&](CbrFlow &f) { f.start = num(); });
        else if (key == "flow_stop") all_flows([&](CbrFlow &f) { f.stop = num(); });
        else if (key == "duration") s.duration = num();
        else if (key == "replications")
        {
            const auto r = integer();
            if (r < 1) throw ValidationError(key, "must be at least 1");
            s.replications = static_cast<std::uint32_t>(r);
        }
        else if (key == "base_seed") s.base_seed = static_cast<std::uint64_t>(integer());
        else throw ValidationError(key, "unknown key");
    }

    /// `flow = src dst rate deadline [start stop]`; the first such line
    /// replaces the default flow, later ones add flows.
    inline CbrFlow parse_flow(std::string_view value)
    {
        auto parts = detail::split(value, ' ');
        if (parts.size() != 4 && parts.size() != 6)
        {
            throw ValidationError("flow", "expected 'src dst rate deadline [start stop]'");
        }
        CbrFlow f;
        f.src = static_cast<NodeId>(detail::to_int("flow", parts[0]));
        f.dst = static_cast<NodeId>(detail::to_int("flow", parts[1]));
        f.rate = detail::to_double("flow", parts[2]);
        f.deadline = detail::to_double("flow", parts[3]);
        if (parts.size() == 6)
        {
            f.start = detail::to_double("flow", parts[4]);
            f.stop = detail::to_double("flow", parts[5]);
        }
        else
        {
            f.stop = -1.0;
        }
        return f;
    }

    inline Scenario parse_scenario_text(std::string_view text)
    {
        Scenario s;
        s.flows.front().stop = -1.0;
        bool explicit_flows = false;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= text.size())
        {
            const auto nl = text.find('\n', pos);
            auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
            pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
            ++line_no;
            if (const auto hash = line.find('#'); hash != std::string_view::npos)
            {
                line = line.substr(0, hash);
            }
            line = detail::trim(line);
            if (line.empty())
            {
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string_view::npos)
            {
                throw ParseError(line_no, "expected 'key = value'");
            }
            const std::string key(detail::trim(line.substr(0, eq)));
            const auto value = detail::trim(line.substr(eq + 1));
            if (key.empty())
            {
                throw ParseError(line_no, "missing key");
            }
            if (value.empty())
            {
                throw ParseError(line_no, "missing value for '" + key + "'");
            }
            if (key == "flow")
            {
                if (!explicit_flows)
                {
                    s.flows.clear();
                    explicit_flows = true;
                }
                s.flows.push_back(parse_flow(value));
                continue;
            }
            set_scenario_key(s, key, value);
        }
        s.validate();
        return s;
    }

    inline Scenario parse_scenario(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
        {
            throw MissingFile(path);
        }
        std::stringstream ss;
        ss << in.rdbuf();
        auto s = parse_scenario_text(ss.str());
        if (s.name == "scenario")
        {
            auto base = path.substr(path.find_last_of('/') + 1);
            if (auto dot = base.rfind('.'); dot != std::string::npos)
            {
                base = base.substr(0, dot);
            }
            s.name = base;
        }
        return s;
    }
} // namespace manet
