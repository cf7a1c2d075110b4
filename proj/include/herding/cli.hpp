#pragma once

#include "herding/model.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace herding::cli {

enum class OutputFormat { Csv, Json, Both };

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitNotHerded = 2;
inline constexpr int kExitCheckFailed = 3;

struct RunOptions {
  std::filesystem::path config;
  std::optional<ControlMode> mode;
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
  std::optional<double> t_max;
  std::filesystem::path out_dir = ".";
  OutputFormat format = OutputFormat::Both;
};

/// Output file names inside out_dir.
inline constexpr const char* kTrajectoryFile = "trajectory.csv";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kConfigEchoFile = "config.json";

/// 0: herded, 2: ran without herding, 1: could not run.
int cmd_run(const RunOptions& options, std::ostream& out, std::ostream& err);

struct VerifyOptions {
  std::vector<std::string> checks{"all"};
  std::optional<std::size_t> trials;
  std::uint64_t seed = 0;
  JacobianMode jacobian_mode = JacobianMode::ExactPerHerder;
};

/// 0 when every selected check passes, 3 otherwise.
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);

}  // namespace herding::cli
