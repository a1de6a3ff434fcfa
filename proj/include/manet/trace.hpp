#pragma once

// One-line-per-event trace records:
//   <time:6 decimals> <KIND> n=<node> p=<pkt-id> t=<CBR|RREQ|RREP|RERR> r=<reason>

#include "manet/engine.hpp"
#include "manet/packets.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manet
{
    enum class TraceKind : std::uint8_t
    {
        Send,
        Recv,
        Fwd,
        Drop,
        Die,
    };

    enum class DropReason : std::uint8_t
    {
        None,
        QueueFull,
        Expired,
        Dead,
        NoRoute,
        BrokenLink,
        Duplicate,
    };

    inline constexpr std::array<std::string_view, 5> kTraceKindNames{"SEND", "RECV", "FWD", "DROP", "DIE"};
    inline constexpr std::array<std::string_view, 7> kDropReasonNames{"none",    "queue_full",  "expired",  "dead",
                                                                      "no_route", "broken_link", "duplicate"};
    inline constexpr std::array<std::string_view, 4> kPacketTypeNames{"CBR", "RREQ", "RREP", "RERR"};

    inline constexpr std::string_view to_string(TraceKind k) noexcept { return kTraceKindNames[static_cast<std::size_t>(k)]; }
    inline constexpr std::string_view to_string(DropReason r) noexcept { return kDropReasonNames[static_cast<std::size_t>(r)]; }

    struct TraceEvent
    {
        SimTime time;
        TraceKind kind = TraceKind::Send;
        NodeId node = 0;
        PacketId packet = 0;
        PacketType type = PacketType::Cbr;
        DropReason reason = DropReason::None;

        friend bool operator==(const TraceEvent &, const TraceEvent &) = default;
    };

    class TraceParseError : public std::runtime_error
    {
    public:
        TraceParseError(std::size_t line, const std::string &what)
            : std::runtime_error("trace line " + std::to_string(line) + ": " + what), line_(line)
        {
        }
        std::size_t line() const noexcept { return line_; }

    private:
        std::size_t line_;
    };

    /// Formats the timestamp from integer microseconds, so the six decimals are exact.
    inline std::string format_time(SimTime t)
    {
        const auto us = t.micros();
        char buf[32];
        std::snprintf(buf, sizeof buf, "%s%lld.%06lld", us < 0 ? "-" : "", static_cast<long long>(std::abs(us) / 1'000'000),
                      static_cast<long long>(std::abs(us) % 1'000'000));
        return buf;
    }

    inline std::string format_trace_line(const TraceEvent &e)
    {
        std::string s = format_time(e.time);
        s += ' ';
        s += to_string(e.kind);
        s += " n=";
        s += std::to_string(e.node);
        s += " p=";
        s += std::to_string(e.packet);
        s += " t=";
        s += to_string(e.type);
        s += " r=";
        s += to_string(e.reason);
        return s;
    }

    namespace detail
    {
        template <std::size_t N>
        std::optional<std::size_t> lookup(const std::array<std::string_view, N> &names, std::string_view s)
        {
            for (std::size_t i = 0; i < N; ++i)
            {
                if (names[i] == s)
                {
                    return i;
                }
            }
            return std::nullopt;
        }

        template <class Int>
        std::optional<Int> parse_int(std::string_view s)
        {
            Int v{};
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc{} || ptr != s.data() + s.size())
            {
                return std::nullopt;
            }
            return v;
        }

        /// "12.345678" → 12345678 µs without going through floating point.
        inline std::optional<SimTime> parse_time(std::string_view s)
        {
            bool neg = false;
            if (!s.empty() && s.front() == '-')
            {
                neg = true;
                s.remove_prefix(1);
            }
            const auto dot = s.find('.');
            if (dot == std::string_view::npos || s.size() - dot - 1 != 6)
            {
                return std::nullopt;
            }
            auto whole = parse_int<std::int64_t>(s.substr(0, dot));
            auto frac = parse_int<std::int64_t>(s.substr(dot + 1));
            if (!whole || !frac)
            {
                return std::nullopt;
            }
            const auto us = *whole * 1'000'000 + *frac;
            return SimTime::from_micros(neg ? -us : us);
        }

        inline std::optional<std::string_view> field(std::string_view tok, std::string_view key)
        {
            if (tok.size() < key.size() + 1 || tok.substr(0, key.size()) != key || tok[key.size()] != '=')
            {
                return std::nullopt;
            }
            return tok.substr(key.size() + 1);
        }
    } // namespace detail

    inline TraceEvent parse_trace_line(std::string_view line, std::size_t line_no = 0)
    {
        std::array<std::string_view, 6> tok{};
        std::size_t n = 0;
        std::size_t pos = 0;
        while (pos < line.size())
        {
            const auto next = line.find(' ', pos);
            const auto end = next == std::string_view::npos ? line.size() : next;
            if (n == tok.size())
            {
                throw TraceParseError(line_no, "too many fields");
            }
            tok[n++] = line.substr(pos, end - pos);
            pos = end + 1;
        }
        if (n != tok.size())
        {
            throw TraceParseError(line_no, "expected 6 fields");
        }
        TraceEvent e;
        auto t = detail::parse_time(tok[0]);
        auto kind = detail::lookup(kTraceKindNames, tok[1]);
        auto n_val = detail::field(tok[2], "n");
        auto p_val = detail::field(tok[3], "p");
        auto t_val = detail::field(tok[4], "t");
        auto r_val = detail::field(tok[5], "r");
        std::optional<NodeId> node;
        std::optional<PacketId> pkt;
        std::optional<std::size_t> type;
        std::optional<std::size_t> reason;
        if (n_val) node = detail::parse_int<NodeId>(*n_val);
        if (p_val) pkt = detail::parse_int<PacketId>(*p_val);
        if (t_val) type = detail::lookup(kPacketTypeNames, *t_val);
        if (r_val) reason = detail::lookup(kDropReasonNames, *r_val);
        if (!t || !kind || !node || !pkt || !type || !reason)
        {
            throw TraceParseError(line_no, "malformed field in '" + std::string(line) + "'");
        }
        e.time = *t;
        e.kind = static_cast<TraceKind>(*kind);
        e.node = *node;
        e.packet = *pkt;
        e.type = static_cast<PacketType>(*type);
        e.reason = static_cast<DropReason>(*reason);
        return e;
    }

    inline void write_trace(std::ostream &os, const std::vector<TraceEvent> &events)
    {
        for (const auto &e : events)
        {
            os << format_trace_line(e) << '\n';
        }
    }

    inline std::vector<TraceEvent> read_trace(std::istream &is)
    {
        std::vector<TraceEvent> out;
        std::string line;
        std::size_t n = 0;
        while (std::getline(is, line))
        {
            ++n;
            if (line.empty())
            {
                continue;
            }
            out.push_back(parse_trace_line(line, n));
        }
        return out;
    }
} // namespace manet
