#pragma once

#include "herding/model.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace herding::sim {

struct StepRecord {
  double t = 0.0;
  std::vector<Vec2> evaders;
  std::vector<Vec2> herders;
  std::vector<Vec2> u_H;
  std::vector<double> h1_pos;   // per evader
  std::vector<double> h1_full;  // per evader
  std::vector<double> h2_pos;   // per canonical pair (i < j), every pair
  std::vector<double> h2_full;
  std::vector<double> d_goal;   // signed distance to the goal disk boundary
  std::vector<double> d_safe;   // pair separation
  bool relaxed = false;
  double min_c = 0.0;           // +inf when no pair was constrained
};

struct RunSummary {
  bool success = false;
  std::optional<double> time_to_goal;  // start of the successful hold window
  double t_end = 0.0;
  std::size_t steps = 0;
  double min_h2_pos = 0.0;   // +inf without pairs
  double min_h2_full = 0.0;
  double min_c = 0.0;
  std::size_t clamp_count = 0;
  std::size_t relax_count = 0;
  std::size_t perturb_count = 0;
  double max_herder_path = 0.0;
  std::optional<std::string> error;  // set when the run aborted
};

struct TrajectoryLog {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<StepRecord> records;
  RunSummary summary;
};

/// Closed-loop run: one synthesis and one RK4 step per dt until every evader has stayed in
/// the goal for hold_time, or t_max elapses. Errors after validation end the run early and
/// are reported through summary.error.
TrajectoryLog run(const ScenarioConfig& cfg);

struct WindowStats {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct MetricsReport {
  std::vector<double> t;
  std::vector<std::vector<double>> h1_pos;  // [evader][step]
  std::vector<std::vector<double>> h2_pos;  // [pair][step]
  std::vector<std::vector<double>> d_goal;
  std::vector<std::vector<double>> d_safe;
  std::vector<WindowStats> final_h1_pos;    // per evader, over the last hold_time
  std::vector<WindowStats> final_h2_pos;    // per pair
  double window_start = 0.0;
  RunSummary summary;
};

/// Throws EmptyLog when the run recorded no steps.
MetricsReport metrics(const TrajectoryLog& log, double hold_time);

}  // namespace herding::sim
