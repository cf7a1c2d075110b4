#pragma once

#include "herding/model.hpp"
#include "herding/sim.hpp"

#include <filesystem>
#include <string>

namespace herding::io {

/// Strict parse: unknown keys raise ConfigError naming the key. Missing keys take the
/// reference-scenario defaults.
ScenarioConfig config_from_json(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Fully resolved config; loading it back reproduces the same scenario.
std::string config_to_json(const ScenarioConfig& cfg);

std::string trajectory_csv(const sim::TrajectoryLog& log);
std::string metrics_json(const sim::TrajectoryLog& log, double hold_time);

/// Writes to a sibling temporary file and renames it over the target.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace herding::io
