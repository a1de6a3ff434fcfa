// Single replication of a scenario: writes the event trace and one CSV row.

#include "common.hpp"

#include "manet/batch.hpp"
#include "manet/simulation.hpp"
#include "manet/trace.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"Run one seeded replication of a MANET scenario"};
    std::string scenario_path;
    std::optional<std::uint64_t> seed;
    std::string trace_path;
    std::string csv_path;
    std::string policy_name;
    app.add_option("scenario", scenario_path, "Scenario file (key = value)")->required();
    app.add_option("--seed", seed, "Replication seed (default: base seed)");
    app.add_option("--trace", trace_path, "Write the event trace here");
    app.add_option("--csv", csv_path, "Write a one-row metrics CSV here");
    app.add_option("--policy", policy_name, "Override the scenario's routing policy");
    CLI11_PARSE(app, argc, argv);

    try
    {
        auto s = tools::load(scenario_path);
        if (!policy_name.empty())
        {
            auto p = manet::parse_policy(policy_name);
            if (!p)
            {
                std::cerr << "simrun: unknown policy '" << policy_name << "'\n";
                return 2;
            }
            s.policy = *p;
        }
        const auto run_seed = seed.value_or(s.base_seed);
        const auto result = manet::run_scenario(s, run_seed);

        if (!trace_path.empty())
        {
            std::ofstream out(trace_path);
            if (!out)
            {
                std::cerr << "simrun: cannot write " << trace_path << '\n';
                return 1;
            }
            manet::write_trace(out, result.trace);
        }

        manet::BatchRow row;
        row.scenario = s.name;
        row.policy = s.policy.name;
        row.seed = run_seed;
        row.rate_pps = s.flows.front().rate;
        row.nodes = s.total_nodes();
        row.deadline_s = s.flows.front().deadline;
        row.metrics = manet::single(result.report);
        if (!csv_path.empty())
        {
            std::ofstream out(csv_path);
            if (!out)
            {
                std::cerr << "simrun: cannot write " << csv_path << '\n';
                return 1;
            }
            manet::write_csv(out, {row});
        }

        const auto &r = result.report;
        std::printf("scenario %s  policy %s  seed %llu\n", s.name.c_str(), s.policy.name.c_str(),
                    static_cast<unsigned long long>(run_seed));
        std::printf("  generated %lld  delivered %lld  in time %lld\n", static_cast<long long>(r.counts.generated),
                    static_cast<long long>(r.counts.delivered), static_cast<long long>(r.counts.delivered_in_time));
        std::printf("  delivery ratio   %.6f\n  in-time ratio    %.6f\n", r.delivery_ratio, r.in_time_ratio);
        if (r.mean_e2e_delay) std::printf("  mean delay       %.6f s\n", *r.mean_e2e_delay);
        std::printf("  SMH lifetime     %.6f s%s\n", r.lifetime_smh, r.lifetime_censored ? " (censored)" : "");
        if (r.energy_per_bit) std::printf("  energy per bit   %.6e J\n", *r.energy_per_bit);
        std::printf("  energy consumed  %.6f J  trace events %zu\n", r.energy_consumed, result.trace.size());
    }
    catch (const std::exception &e)
    {
        std::cerr << "simrun: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
