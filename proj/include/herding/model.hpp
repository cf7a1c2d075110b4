#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace herding {

using Vec2 = Eigen::Vector2d;
using Jacobian2 = Eigen::Matrix2d;

/// Positions of every agent at one instant.
struct WorldState {
  double t = 0.0;
  std::vector<Vec2> evaders;
  std::vector<Vec2> herders;

  bool finite() const;
};

struct ControlGains {
  double kappa_H = 10.0;      // repulsion gain
  double gamma_h = 0.5;       // goal barrier rate
  double gamma_a = 0.5;       // avoidance barrier rate
  double mu = 1.0;            // backstepping weight
  double alpha_split = 0.5;   // share of the pairwise margin given to the first herder
  // Accepted for compatibility with published parameter sets; no control law reads them.
  double k_h = 1.0;
  double k_a = 1.0;
};

enum class ControlMode { Centralized, Decentralized };
enum class JacobianMode { ExactPerHerder, PaperLiteral };

struct PerturbationSettings {
  double stall_speed = 1e-3;
  double dwell = 1.0;
  double magnitude = 0.15;
};

struct ScenarioConfig {
  std::size_t m = 3;
  std::size_t n = 3;
  ControlGains gains;
  Vec2 goal_center{30.0, 10.0};
  double goal_radius = 3.5;
  double r_avoid = 0.5;
  double v_max = 3.0;
  std::optional<double> neighbor_dist;  // nullopt: every other evader is a neighbor
  double dt = 0.01;
  double t_max = 60.0;
  double hold_time = 5.0;
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::Decentralized;
  JacobianMode jacobian_mode = JacobianMode::ExactPerHerder;
  std::vector<Vec2> initial_evaders;
  std::vector<Vec2> initial_herders;
  double singularity_eps = 1e-3;
  PerturbationSettings perturbation;

  /// Throws ConfigError on a hard violation; returns soft warnings.
  std::vector<std::string> validate() const;

  WorldState initial_state() const;
};

/// The scenario used by the reference simulation: 3 evaders, 3 herders, goal (30, 10).
ScenarioConfig default_scenario();

/// herder_to_evader[k] is the evader herder k is responsible for.
struct Assignment {
  std::vector<std::size_t> herder_to_evader;

  /// Inverse map; only meaningful for a bijection.
  std::vector<std::size_t> evader_to_herder() const;
  bool is_bijection(std::size_t evader_count) const;
};

bool in_goal_region(const Vec2& p, const ScenarioConfig& cfg);

/// ||xi - xj||^2 - r_avoid^2; positive means the pair is separated.
double pair_clearance(const Vec2& xi, const Vec2& xj, const ScenarioConfig& cfg);

/// Minimum total-distance matching for n <= 8, greedy nearest-unassigned beyond that.
Assignment nearest_assignment(const WorldState& state);

const char* to_string(ControlMode mode);
const char* to_string(JacobianMode mode);

}  // namespace herding
