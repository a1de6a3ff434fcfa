#pragma once

// Parameter sweeps with replication averaging, and paired policy comparisons.

#include "manet/metrics.hpp"
#include "manet/qos.hpp"
#include "manet/scenario.hpp"
#include "manet/simulation.hpp"

#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace manet
{
    struct SweepAxis
    {
        std::string key;
        std::vector<std::string> values;
    };

    /// "rate=5,9,10" -> {rate, [5, 9, 10]}.
    inline SweepAxis parse_sweep(std::string_view text)
    {
        const auto eq = text.find('=');
        if (eq == std::string_view::npos)
        {
            throw std::invalid_argument("sweep must look like key=v1,v2,...: " + std::string(text));
        }
        SweepAxis a;
        a.key = std::string(detail::trim(text.substr(0, eq)));
        for (auto v : detail::split(text.substr(eq + 1), ','))
        {
            v = detail::trim(v);
            if (!v.empty()) a.values.emplace_back(v);
        }
        if (a.key.empty() || a.values.empty())
        {
            throw std::invalid_argument("empty sweep: " + std::string(text));
        }
        return a;
    }

    using GridPoint = std::vector<std::pair<std::string, std::string>>;

    /// Cartesian product of the axes; the last axis varies fastest. No axes
    /// gives the single empty point (the scenario as written).
    inline std::vector<GridPoint> expand_grid(const std::vector<SweepAxis> &axes)
    {
        std::vector<GridPoint> grid{GridPoint{}};
        for (const auto &axis : axes)
        {
            std::vector<GridPoint> next;
            for (const auto &p : grid)
            {
                for (const auto &v : axis.values)
                {
                    auto q = p;
                    q.emplace_back(axis.key, v);
                    next.push_back(std::move(q));
                }
            }
            grid = std::move(next);
        }
        return grid;
    }

    inline std::string describe(const GridPoint &p)
    {
        std::string out;
        for (const auto &[k, v] : p)
        {
            if (!out.empty()) out += ' ';
            out += k + '=' + v;
        }
        return out.empty() ? "(base)" : out;
    }

    inline Scenario apply_point(Scenario s, const GridPoint &p, const Policy &policy)
    {
        s.policy = policy;
        for (const auto &[k, v] : p)
        {
            set_scenario_key(s, k, v);
        }
        s.policy.rtdsr_admission = s.policy.rtdsr_admission || policy.rtdsr_admission;
        s.validate();
        return s;
    }

    struct BatchRow
    {
        std::size_t point = 0;
        std::string point_label;
        std::string scenario;
        std::string policy;
        std::optional<std::uint64_t> seed; // empty for the mean row
        double rate_pps = 0.0;
        int nodes = 0;
        double deadline_s = 0.0;
        bool failed = false;
        std::string error;
        MeanReport metrics; // replications = 1 for a single run
    };

    struct BatchOptions
    {
        std::vector<Policy> policies; // empty: the scenario's own policy
        std::optional<std::uint32_t> replications;
        std::optional<std::uint64_t> base_seed;
    };

    struct BatchResult
    {
        std::vector<BatchRow> rows; // per point, per policy: replications then mean
        std::vector<std::string> failed_points;

        bool ok() const noexcept { return failed_points.empty(); }
    };

    inline MeanReport single(const MetricsReport &r) { return mean_of(std::span<const MetricsReport>(&r, 1)); }

    inline BatchResult run_batch(const Scenario &base, const std::vector<SweepAxis> &axes, const BatchOptions &opt = {})
    {
        const auto grid = expand_grid(axes);
        auto policies = opt.policies;
        if (policies.empty())
        {
            policies.push_back(base.policy);
        }
        const auto reps = opt.replications.value_or(base.replications);
        const auto seed0 = opt.base_seed.value_or(base.base_seed);
        if (reps == 0)
        {
            throw ValidationError("replications", "must be at least 1");
        }

        BatchResult out;
        for (std::size_t gi = 0; gi < grid.size(); ++gi)
        {
            bool point_failed = false;
            for (const auto &policy : policies)
            {
                BatchRow proto;
                proto.point = gi;
                proto.point_label = describe(grid[gi]);
                proto.scenario = base.name;
                proto.policy = policy.name;

                std::optional<Scenario> s;
                std::string setup_error;
                try
                {
                    s = apply_point(base, grid[gi], policy);
                    proto.rate_pps = s->flows.front().rate;
                    proto.nodes = s->total_nodes();
                    proto.deadline_s = s->flows.front().deadline;
                }
                catch (const std::exception &e)
                {
                    setup_error = e.what();
                }

                std::vector<MetricsReport> done;
                for (std::uint32_t r = 0; r < reps; ++r)
                {
                    BatchRow row = proto;
                    row.seed = replication_seed(seed0, r);
                    try
                    {
                        if (!s) throw std::runtime_error(setup_error);
                        auto result = run_scenario(*s, *row.seed);
                        if (result.report.counts.generated == 0) throw ZeroGenerated();
                        row.metrics = single(result.report);
                        done.push_back(result.report);
                    }
                    catch (const std::exception &e)
                    {
                        row.failed = true;
                        row.error = e.what();
                        point_failed = true;
                    }
                    out.rows.push_back(std::move(row));
                }
                BatchRow mean = proto;
                if (done.empty())
                {
                    mean.failed = true;
                    mean.error = "no replication completed";
                }
                else
                {
                    mean.metrics = mean_of(done);
                }
                out.rows.push_back(std::move(mean));
            }
            if (point_failed)
            {
                out.failed_points.push_back(describe(grid[gi]));
            }
        }
        return out;
    }

    inline constexpr const char *kCsvHeader = "scenario,policy,seed,rate_pps,nodes,deadline_s,delivery_ratio,in_time_ratio,"
                                              "mean_delay_s,lifetime_smh_s,lifetime_censored,energy_per_bit_j";

    namespace detail
    {
        inline std::string num(double v)
        {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }

        inline std::string num(const std::optional<double> &v) { return v ? num(*v) : std::string(); }
    } // namespace detail

    /// One CSV line in kCsvHeader's column order. Single runs report the
    /// censored flag as 0/1; mean rows report the censored fraction.
    inline std::string csv_row(const BatchRow &r)
    {
        using detail::num;
        std::string line = r.scenario + ',' + r.policy + ',' + (r.seed ? std::to_string(*r.seed) : "mean") + ',' +
                           num(r.rate_pps) + ',' + std::to_string(r.nodes) + ',' + num(r.deadline_s);
        if (r.failed)
        {
            for (int i = 0; i < 6; ++i) line += ",failed";
            return line;
        }
        const auto &m = r.metrics;
        line += ',' + num(m.delivery_ratio) + ',' + num(m.in_time_ratio) + ',' + num(m.mean_e2e_delay) + ',' +
                num(m.lifetime_smh) + ',' + num(m.censored_fraction) + ',' + num(m.energy_per_bit);
        return line;
    }

    inline void write_csv(std::ostream &out, const std::vector<BatchRow> &rows)
    {
        out << kCsvHeader << '\n';
        for (const auto &r : rows) out << csv_row(r) << '\n';
    }

    // ---------------------------------------------------------------------
    // Paired comparison

    /// Relative improvement of `candidate` over `baseline`, in percent, where
    /// lower is better (energy per bit).
    inline std::optional<double> reduction_pct(const std::optional<double> &baseline, const std::optional<double> &candidate)
    {
        if (!baseline || !candidate || *baseline == 0.0) return std::nullopt;
        return (*baseline - *candidate) / *baseline * 100.0;
    }

    /// Relative gain in percent where higher is better (lifetime).
    inline std::optional<double> gain_pct(double baseline, double candidate)
    {
        if (baseline == 0.0) return std::nullopt;
        return (candidate - baseline) / baseline * 100.0;
    }

    /// Side-by-side table: one line per (grid point, seed or mean), one
    /// column group per policy, plus gains of every policy over the first.
    inline void write_comparison_csv(std::ostream &out, const BatchResult &batch, const std::vector<std::string> &policies)
    {
        static constexpr const char *kMetrics[] = {"delivery_ratio", "in_time_ratio",     "mean_delay_s",
                                                   "lifetime_smh_s", "lifetime_censored", "energy_per_bit_j"};
        out << "scenario,point,seed,rate_pps,nodes,deadline_s";
        for (const auto &p : policies)
        {
            for (const auto *m : kMetrics) out << ',' << p << '_' << m;
        }
        for (std::size_t i = 1; i < policies.size(); ++i)
        {
            out << ',' << policies[i] << "_lifetime_gain_pct," << policies[i] << "_energy_per_bit_reduction_pct";
        }
        out << '\n';

        // Rows of one grid point are laid out policy-major with equal counts.
        std::size_t i = 0;
        while (i < batch.rows.size())
        {
            const auto point = batch.rows[i].point;
            std::size_t end = i;
            while (end < batch.rows.size() && batch.rows[end].point == point) ++end;
            const std::size_t per_policy = (end - i) / policies.size();
            for (std::size_t k = 0; k < per_policy; ++k)
            {
                const auto &first = batch.rows[i + k];
                out << first.scenario << ',' << '"' << first.point_label << '"' << ','
                    << (first.seed ? std::to_string(*first.seed) : "mean") << ',' << detail::num(first.rate_pps) << ','
                    << first.nodes << ',' << detail::num(first.deadline_s);
                for (std::size_t p = 0; p < policies.size(); ++p)
                {
                    const auto &r = batch.rows[i + p * per_policy + k];
                    if (r.failed)
                    {
                        for (int c = 0; c < 6; ++c) out << ",failed";
                        continue;
                    }
                    const auto &m = r.metrics;
                    out << ',' << detail::num(m.delivery_ratio) << ',' << detail::num(m.in_time_ratio) << ','
                        << detail::num(m.mean_e2e_delay) << ',' << detail::num(m.lifetime_smh) << ','
                        << detail::num(m.censored_fraction) << ',' << detail::num(m.energy_per_bit);
                }
                for (std::size_t p = 1; p < policies.size(); ++p)
                {
                    const auto &r = batch.rows[i + p * per_policy + k];
                    if (first.failed || r.failed)
                    {
                        out << ",,";
                        continue;
                    }
                    out << ',' << detail::num(gain_pct(first.metrics.lifetime_smh, r.metrics.lifetime_smh)) << ','
                        << detail::num(reduction_pct(first.metrics.energy_per_bit, r.metrics.energy_per_bit));
                }
                out << '\n';
            }
            i = end;
        }
    }

    /// Runs every policy on the same grid and seeds; seeds are shared across
    /// policies, so paired runs see identical mobility and traffic.
    inline BatchResult compare_policies(const Scenario &base, const std::vector<Policy> &policies,
                                        const std::vector<SweepAxis> &axes, BatchOptions opt = {})
    {
        if (policies.size() < 2)
        {
            throw std::invalid_argument("comparison needs at least two policies");
        }
        opt.policies = policies;
        return run_batch(base, axes, opt);
    }
} // namespace manet
