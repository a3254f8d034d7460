#pragma once

#include <optional>
#include <string>

#include "json.hpp"
#include "mrac/simengine.hpp"

namespace mrac {

/// Parse a scenario document. Unknown keys are rejected; every dimension is
/// validated. Errors carry the dotted field path (e.g. "plant.B").
SimConfig parse_scenario(const nlohmann::json& doc);
SimConfig load_scenario(const std::string& path);

/// Canonical serialized form with all defaults resolved; parsing it back
/// yields the same configuration.
nlohmann::json serialize_scenario(const SimConfig& config);

/// Row thinning for CSV emission: keep step 0, every `every`-th step and the
/// final step.
void write_trajectory_csv(const RunLog& log, const std::string& path, std::size_t every = 1);

nlohmann::json summarize_run(const RunLog& log, const SimConfig& config);

/// `run` verb: execute the scenario, write trajectory.csv and summary.json
/// into out_dir. Returns a process exit status.
int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<double> dt_override = std::nullopt,
            std::optional<double> t_end_override = std::nullopt);

/// `compare` verb: run the proposed law and the classical baseline on the
/// same scenario; write comparison.csv and a summary with a verdict block.
int cmd_compare(const std::string& scenario_path, const std::string& out_dir);

/// CSV thinning factor from the environment (MRAC_LOG_EVERY, default 1).
std::size_t log_every_from_env();

}  // namespace mrac
