#ifndef PMFIX_SCENARIO_HPP
#define PMFIX_SCENARIO_HPP

#include <json.hpp>

#include <cstdint>
#include <optional>
#include <string>

namespace pmfix {

/// Exit-code contract: 0 all checks green, 1 bad input (parse/schema/io),
/// 2 a mathematical check failed (reports are still written).
struct RunResult {
    int exit_code = 0;
    nlohmann::json summary;
};

RunResult run_scenario(const nlohmann::json& scenario, const std::string& out_dir,
                       std::optional<std::uint64_t> seed_override = std::nullopt);

/// Loads and runs a scenario file; maps every failure to the exit contract.
int run_scenario_file(const std::string& path, const std::string& out_dir_override,
                      std::optional<std::uint64_t> seed_override);

nlohmann::json command_schema(const std::string& command);

}  // namespace pmfix

#endif
