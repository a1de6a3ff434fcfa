// Parameter sweeps over a scenario, optionally comparing several policies on
// paired seeds.

#include "common.hpp"

#include "manet/batch.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

int main(int argc, char **argv)
{
    CLI::App app{"Sweep a MANET scenario over parameters and policies"};
    std::string scenario_path;
    std::vector<std::string> sweeps;
    std::optional<std::uint32_t> reps;
    std::string policies_arg;
    std::string csv_path;
    std::string compare_path;
    app.add_option("scenario", scenario_path, "Scenario file (key = value)")->required();
    app.add_option("--sweep", sweeps, "key=v1,v2,... (repeatable; cartesian product)");
    app.add_option("--reps", reps, "Replications per grid point (default: scenario)");
    app.add_option("--policies", policies_arg, "Comma-separated policies (default: scenario's)");
    app.add_option("--csv", csv_path, "Per-replication and mean rows");
    app.add_option("--compare", compare_path, "Side-by-side comparison CSV (needs two or more policies)");
    CLI11_PARSE(app, argc, argv);

    try
    {
        const auto s = tools::load(scenario_path);
        std::vector<manet::SweepAxis> axes;
        for (const auto &sw : sweeps) axes.push_back(manet::parse_sweep(sw));

        manet::BatchOptions opt;
        opt.replications = reps;
        std::vector<std::string> names;
        for (auto n : manet::detail::split(policies_arg, ','))
        {
            n = manet::detail::trim(n);
            if (n.empty()) continue;
            auto p = manet::parse_policy(n);
            if (!p)
            {
                std::cerr << "simbatch: unknown policy '" << n << "'\n";
                return 2;
            }
            opt.policies.push_back(*p);
            names.push_back(p->name);
        }
        if (!compare_path.empty() && opt.policies.size() < 2)
        {
            std::cerr << "simbatch: --compare needs at least two --policies\n";
            return 2;
        }

        const auto result = manet::run_batch(s, axes, opt);

        if (!csv_path.empty())
        {
            std::ofstream out(csv_path);
            if (!out)
            {
                std::cerr << "simbatch: cannot write " << csv_path << '\n';
                return 1;
            }
            manet::write_csv(out, result.rows);
        }
        else
        {
            manet::write_csv(std::cout, result.rows);
        }
        if (!compare_path.empty())
        {
            std::ofstream out(compare_path);
            if (!out)
            {
                std::cerr << "simbatch: cannot write " << compare_path << '\n';
                return 1;
            }
            manet::write_comparison_csv(out, result, names);
        }
        for (const auto &p : result.failed_points)
        {
            std::cerr << "simbatch: failed grid point: " << p << '\n';
        }
        for (const auto &r : result.rows)
        {
            if (r.failed && r.seed) std::cerr << "  " << r.policy << " seed " << *r.seed << ": " << r.error << '\n';
        }
        return result.ok() ? 0 : 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "simbatch: " << e.what() << '\n';
        return 1;
    }
}
