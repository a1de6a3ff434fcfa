#pragma once

// Route-cost functions and route-selection policies: the energy/queue/delay
// weighted cost with deadline admission, the energy-aware multipath weight,
// real-time admission, and adaptive link weights.

#include "manet/packets.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace manet
{
    class DepletedNode : public std::domain_error
    {
    public:
        explicit DepletedNode(double e) : std::domain_error("node has no remaining energy (" + std::to_string(e) + " J)") {}
    };

    class EmptyCandidates : public std::invalid_argument
    {
    public:
        EmptyCandidates() : std::invalid_argument("route selection over an empty candidate set") {}
    };

    class WeightSumError : public std::invalid_argument
    {
    public:
        explicit WeightSumError(double sum)
            : std::invalid_argument("weights must sum to 1 (got " + std::to_string(sum) + ")")
        {
        }
    };

    inline constexpr double kWeightSumTolerance = 1e-9;

    // ---------------------------------------------------------------------
    // Per-node cost terms

    /// Distance to the next hop over remaining energy.
    inline double energy_cost(double d, double e_remain)
    {
        if (!(e_remain > 0.0))
        {
            throw DepletedNode(e_remain);
        }
        return d / e_remain;
    }

    /// ln(1 + queue length).
    inline double queue_cost(double l_queue) { return std::log1p(l_queue); }

    /// Queueing plus transmission delay estimate at one node. The hop-count
    /// term uses the full route length at every node.
    inline double delay_cost(double l_queue, double t_local, double t_transmit, std::size_t n_hops)
    {
        return l_queue * t_local + t_transmit * static_cast<double>(n_hops);
    }

    // ---------------------------------------------------------------------
    // Weighted route cost

    struct CostWeights
    {
        double energy = 1.0 / 3.0;
        double queue = 1.0 / 3.0;
        double delay = 1.0 / 3.0;

        double sum() const noexcept { return energy + queue + delay; }
        friend bool operator==(const CostWeights &, const CostWeights &) = default;
    };

    namespace presets
    {
        inline constexpr CostWeights kEnergyAware{0.6, 0.2, 0.2};
        inline constexpr CostWeights kDelayAware{0.2, 0.2, 0.6};
        inline constexpr CostWeights kDefault{0.33, 0.33, 0.33};
        /// Equal thirds; with the ×3 scale this is the unweighted sum.
        inline constexpr CostWeights kUnweighted{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    } // namespace presets

    /// Table rows are accepted verbatim (0.33 ×3 = 0.99); any other triple must
    /// lie on the simplex.
    inline bool is_tabulated(const CostWeights &w) noexcept
    {
        return w == presets::kEnergyAware || w == presets::kDelayAware || w == presets::kDefault;
    }

    inline void check_weights(const CostWeights &w)
    {
        if (w.energy < 0.0 || w.queue < 0.0 || w.delay < 0.0)
        {
            throw std::invalid_argument("weights must be non-negative");
        }
        if (!is_tabulated(w) && std::abs(w.sum() - 1.0) > kWeightSumTolerance)
        {
            throw WeightSumError(w.sum());
        }
    }

    struct QosConfig
    {
        double alpha = 1.0; // energy normalisation, m⁻¹·J
        double beta = 1.0;  // queue normalisation
        double gamma = 1.0; // delay normalisation, s⁻¹
        CostWeights weights = presets::kUnweighted;
        double scale = 3.0; // 3 × equal thirds is the unweighted sum
        double t_local = 0.005;   // per-packet processing time, s
        double t_transmit = 0.002048; // one data-packet transmission, s
        std::string preset = "eddsr";

        void validate() const
        {
            check_weights(weights);
            if (alpha < 0.0 || beta < 0.0 || gamma < 0.0 || scale <= 0.0)
            {
                throw std::invalid_argument("normalisation factors must be non-negative");
            }
            if (t_local < 0.0 || t_transmit < 0.0)
            {
                throw std::invalid_argument("timing parameters must be non-negative");
            }
        }
    };

    struct CostBreakdown
    {
        double c_energy = 0.0;
        double c_queue = 0.0;
        double c_delay = 0.0;
        double total = 0.0;
    };

    /// Weighted cost contribution of one stamped node.
    inline double node_cost(const NodeStatusStamp &s, const QosConfig &cfg, std::size_t n_hops)
    {
        const double ce = energy_cost(s.d_i, s.e_remain);
        const double cq = queue_cost(s.l_queue);
        const double cd = delay_cost(s.l_queue, cfg.t_local, cfg.t_transmit, n_hops);
        return cfg.scale * (cfg.weights.energy * (cfg.alpha * ce) + cfg.weights.queue * (cfg.beta * cq) +
                            cfg.weights.delay * (cfg.gamma * cd));
    }

    /// Sums in list order, so the result is bit-identical to accumulating
    /// node_cost() as the stamps are appended.
    inline CostBreakdown route_cost(std::span<const NodeStatusStamp> stamps, const QosConfig &cfg, std::size_t n_hops)
    {
        CostBreakdown b;
        for (const auto &s : stamps)
        {
            b.c_energy += energy_cost(s.d_i, s.e_remain);
            b.c_queue += queue_cost(s.l_queue);
            b.c_delay += delay_cost(s.l_queue, cfg.t_local, cfg.t_transmit, n_hops);
            b.total += node_cost(s, cfg, n_hops);
        }
        return b;
    }

    /// True iff the deadline strictly exceeds the summed delay cost.
    inline bool deadline_feasible(double d_k, double delay_sum) noexcept { return d_k > delay_sum; }

    inline bool deadline_feasible(double d_k, std::span<const double> delay_costs) noexcept
    {
        double sum = 0.0;
        for (double c : delay_costs)
        {
            sum += c;
        }
        return deadline_feasible(d_k, sum);
    }

    enum class Admission : std::uint8_t
    {
        Forward,
        Discard,
    };

    /// Prefix check at an intermediate node: the delay accumulated so far must
    /// still fit in the deadline.
    inline Admission rrep_admission_check(const Rrep &rrep, double d_k) noexcept
    {
        return deadline_feasible(d_k, rrep.cost_delay) ? Admission::Forward : Admission::Discard;
    }

    /// What a node reports about itself when a reply passes through.
    struct NodeStatus
    {
        NodeId node = 0;
        double distance_to_next = 0.0;
        int queue_length = 0;
        double energy = 0.0;
    };

    /// Appends the node's stamp and folds its contribution into the two
    /// running totals carried by the reply.
    inline void stamp_status(const NodeStatus &st, Rrep &rrep, const QosConfig &cfg)
    {
        if (!(st.energy > 0.0))
        {
            throw DepletedNode(st.energy);
        }
        NodeStatusStamp s{st.node, st.distance_to_next, st.queue_length, st.energy};
        const auto hops = rrep.hop_count();
        rrep.cost += node_cost(s, cfg, hops);
        rrep.cost_delay += delay_cost(s.l_queue, cfg.t_local, cfg.t_transmit, hops);
        rrep.stamps.push_back(s);
    }

    // ---------------------------------------------------------------------
    // Selection

    struct ScoredRoute
    {
        std::vector<NodeId> route;
        double score = 0.0;
    };

    /// Deterministic order on equally scored routes: fewer hops, then the
    /// lexicographically smaller node sequence.
    inline bool tie_break_less(const std::vector<NodeId> &a, const std::vector<NodeId> &b)
    {
        if (a.size() != b.size())
        {
            return a.size() < b.size();
        }
        return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
    }

    /// Index of the minimum-score candidate.
    inline std::size_t select_min_cost(std::span<const ScoredRoute> candidates)
    {
        if (candidates.empty())
        {
            throw EmptyCandidates();
        }
        std::size_t best = 0;
        for (std::size_t i = 1; i < candidates.size(); ++i)
        {
            const auto &c = candidates[i];
            const auto &b = candidates[best];
            if (c.score < b.score || (c.score == b.score && tie_break_less(c.route, b.route)))
            {
                best = i;
            }
        }
        return best;
    }

    // ---------------------------------------------------------------------
    // Energy-aware multipath weight

    struct EmrpStamp
    {
        double p_tx = 1.4;
        double p_rx = 1.0;
        double e_remain = 0.0;      // this node
        double e_remain_next = 0.0; // next hop
        int n_retrans = 0;
        int n_queue = 0;
    };

    /// Transmit/receive power over remaining energy, plus (1 + retransmissions).
    inline double emrp_energy_weight(const EmrpStamp &s)
    {
        if (!(s.e_remain > 0.0))
        {
            throw DepletedNode(s.e_remain);
        }
        if (!(s.e_remain_next > 0.0))
        {
            throw DepletedNode(s.e_remain_next);
        }
        return (s.p_tx / s.e_remain + s.p_rx / s.e_remain_next) + (1.0 + s.n_retrans);
    }

    inline double emrp_queue_weight(const EmrpStamp &s) { return std::log1p(s.n_queue); }

    inline double emrp_route_weight(std::span<const EmrpStamp> stamps, double alpha, double beta)
    {
        double w = 0.0;
        for (const auto &s : stamps)
        {
            w += alpha * emrp_energy_weight(s) + beta * emrp_queue_weight(s);
        }
        return w;
    }

    // ---------------------------------------------------------------------
    // Real-time admission

    struct RtdsrParams
    {
        double e_remaining = 0.0; // time left to the deadline, s
        double t_local = 0.0;
        double t_transmit = 0.0;
        std::vector<double> admitted; // remaining times of already admitted packets
    };

    enum class RtdsrDecision : std::uint8_t
    {
        Admit,
        Reject,
    };

    /// Admit only if the new request and every admitted one keep positive
    /// slack after one more local processing and transmission time.
    inline RtdsrDecision rtdsr_admission(const RtdsrParams &p)
    {
        const double overhead = p.t_local + p.t_transmit;
        if (!(p.e_remaining - overhead > 0.0))
        {
            return RtdsrDecision::Reject;
        }
        for (double e : p.admitted)
        {
            if (!(e - overhead > 0.0))
            {
                return RtdsrDecision::Reject;
            }
        }
        return RtdsrDecision::Admit;
    }

    // ---------------------------------------------------------------------
    // Adaptive link weight

    struct AlwWeights
    {
        double k_bandwidth = 0.33;
        double k_delay = 0.33;
        double k_lifetime = 0.33;

        double sum() const noexcept { return k_bandwidth + k_delay + k_lifetime; }
        friend bool operator==(const AlwWeights &, const AlwWeights &) = default;
    };

    namespace presets
    {
        inline constexpr AlwWeights kAlwVideo{0.5, 0.4, 0.1};
        inline constexpr AlwWeights kAlwFtp{0.5, 0.3, 0.2};
        inline constexpr AlwWeights kAlwMessaging{0.1, 0.4, 0.5};
        inline constexpr AlwWeights kAlwDefault{0.33, 0.33, 0.33};
    } // namespace presets

    inline std::optional<AlwWeights> alw_preset(std::string_view application)
    {
        if (application == "video") return presets::kAlwVideo;
        if (application == "ftp") return presets::kAlwFtp;
        if (application == "messaging") return presets::kAlwMessaging;
        if (application == "default") return presets::kAlwDefault;
        return std::nullopt;
    }

    struct AlwParams
    {
        AlwWeights k;
        double bandwidth = 0.0; // each metric normalised to [0, 1]
        double delay = 0.0;
        double node_lifetime = 0.0;
    };

    inline double alw_link_weight(const AlwParams &p)
    {
        const auto &k = p.k;
        const bool tabulated = k == presets::kAlwVideo || k == presets::kAlwFtp || k == presets::kAlwMessaging ||
                               k == presets::kAlwDefault;
        if (!tabulated && std::abs(k.sum() - 1.0) > kWeightSumTolerance)
        {
            throw WeightSumError(k.sum());
        }
        return k.k_bandwidth * p.bandwidth + k.k_delay * p.delay + k.k_lifetime * p.node_lifetime;
    }

    // ---------------------------------------------------------------------
    // Policies

    enum class PolicyKind : std::uint8_t
    {
        Dsr,
        EdDsr,
        Emrp,
        Alw,
    };

    struct Policy
    {
        PolicyKind kind = PolicyKind::EdDsr;
        std::string name = "eddsr";
        std::optional<CostWeights> weights; // set for the eddsr-* presets
        AlwWeights alw = presets::kAlwDefault;
        bool rtdsr_admission = false;

        /// Replies are stamped and deadline-checked.
        bool stamps_replies() const noexcept { return kind != PolicyKind::Dsr; }
        /// Data packets past their deadline are discarded.
        bool drops_expired() const noexcept { return kind != PolicyKind::Dsr; }
    };

    /// Parses `dsr`, `eddsr`, `eddsr-energy`, `eddsr-delay`, `eddsr-default`,
    /// `emrp`, `alw-<video|ftp|messaging|default>`, each optionally suffixed
    /// with `+rtdsr-admission`.
    inline std::optional<Policy> parse_policy(std::string_view text)
    {
        Policy p;
        constexpr std::string_view kRt = "+rtdsr-admission";
        std::string_view base = text;
        if (base.size() > kRt.size() && base.substr(base.size() - kRt.size()) == kRt)
        {
            p.rtdsr_admission = true;
            base.remove_suffix(kRt.size());
        }
        p.name = std::string(text);
        if (base == "dsr")
        {
            p.kind = PolicyKind::Dsr;
        }
        else if (base == "eddsr")
        {
            p.kind = PolicyKind::EdDsr;
        }
        else if (base == "eddsr-energy")
        {
            p.kind = PolicyKind::EdDsr;
            p.weights = presets::kEnergyAware;
        }
        else if (base == "eddsr-delay")
        {
            p.kind = PolicyKind::EdDsr;
            p.weights = presets::kDelayAware;
        }
        else if (base == "eddsr-default")
        {
            p.kind = PolicyKind::EdDsr;
            p.weights = presets::kDefault;
        }
        else if (base == "emrp")
        {
            p.kind = PolicyKind::Emrp;
        }
        else if (base.starts_with("alw-"))
        {
            auto k = alw_preset(base.substr(4));
            if (!k)
            {
                return std::nullopt;
            }
            p.kind = PolicyKind::Alw;
            p.alw = *k;
        }
        else
        {
            return std::nullopt;
        }
        return p;
    }

    /// Inputs for scoring candidate routes beyond the stamps themselves.
    struct ScoringContext
    {
        QosConfig qos;
        double p_tx = 1.4;
        double p_rx = 1.0;
        double bitrate = 2'000'000;
        double reply_window = 0.5;
        double max_energy = 100.0;
    };

    /// A reply that reached its origin.
    struct RouteCandidate
    {
        std::vector<NodeId> route;
        std::vector<NodeStatusStamp> stamps; // in stamping order (target side first)
        double cost = 0.0;
        double cost_delay = 0.0;
        double target_energy = 0.0;

        std::size_t hop_count() const { return route.empty() ? 0 : route.size() - 1; }
    };

    /// Stamps of the candidate rearranged into per-hop inputs, in forward
    /// (source to destination) order.
    inline std::vector<EmrpStamp> emrp_stamps(const RouteCandidate &c, double p_tx, double p_rx)
    {
        std::vector<EmrpStamp> out;
        const auto n = c.stamps.size();
        out.reserve(n);
        for (std::size_t k = 0; k < n; ++k)
        {
            const auto &s = c.stamps[n - 1 - k];
            const double next = (k + 1 < n) ? c.stamps[n - 2 - k].e_remain : c.target_energy;
            out.push_back(EmrpStamp{p_tx, p_rx, s.e_remain, next, 0, s.l_queue});
        }
        return out;
    }

    /// Link metrics oriented as costs in [0, 1]: unused bandwidth share
    /// (homogeneous radios give 0), delay over the reply window, and consumed
    /// share of the largest battery.
    inline AlwParams alw_params(const NodeStatusStamp &s, const AlwWeights &k, const ScoringContext &ctx)
    {
        AlwParams p;
        p.k = k;
        p.bandwidth = 0.0; // every link runs at the configured bitrate
        const double link_delay = s.l_queue * ctx.qos.t_local + ctx.qos.t_transmit;
        p.delay = std::clamp(link_delay / ctx.reply_window, 0.0, 1.0);
        p.node_lifetime = std::clamp(1.0 - s.e_remain / ctx.max_energy, 0.0, 1.0);
        return p;
    }

    inline double policy_score(const Policy &policy, const RouteCandidate &c, const ScoringContext &ctx)
    {
        switch (policy.kind)
        {
        case PolicyKind::Dsr: return static_cast<double>(c.hop_count());
        case PolicyKind::EdDsr: return c.cost;
        case PolicyKind::Emrp:
        {
            const auto st = emrp_stamps(c, ctx.p_tx, ctx.p_rx);
            return emrp_route_weight(st, ctx.qos.alpha, ctx.qos.beta);
        }
        case PolicyKind::Alw:
        {
            double w = 0.0;
            for (const auto &s : c.stamps)
            {
                w += alw_link_weight(alw_params(s, policy.alw, ctx));
            }
            return w;
        }
        }
        return 0.0;
    }

} // namespace manet
