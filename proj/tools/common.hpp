#pragma once

#include "manet/scenario.hpp"

#include <cstdint>
#include <cstdlib>
#include <optional>
#include <string>

namespace tools
{
    /// SIM_BASE_SEED, when set, replaces the scenario's base seed.
    inline std::optional<std::uint64_t> env_base_seed()
    {
        const char *v = std::getenv("SIM_BASE_SEED");
        if (v == nullptr || *v == '\0')
        {
            return std::nullopt;
        }
        return std::stoull(v);
    }

    inline manet::Scenario load(const std::string &path)
    {
        auto s = manet::parse_scenario(path);
        if (auto seed = env_base_seed())
        {
            s.base_seed = *seed;
        }
        return s;
    }
} // namespace tools
