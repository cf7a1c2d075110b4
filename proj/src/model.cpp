#include "herding/model.hpp"

#include "herding/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace herding {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::SamePairHerder: return "SamePairHerder";
    case ErrorCode::NumericalFailure: return "NumericalFailure";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::EmptyLog: return "EmptyLog";
  }
  return "Unknown";
}

const char* to_string(ControlMode mode) {
  return mode == ControlMode::Centralized ? "centralized" : "decentralized";
}

const char* to_string(JacobianMode mode) {
  return mode == JacobianMode::ExactPerHerder ? "exact_per_herder" : "paper_literal";
}

bool WorldState::finite() const {
  auto ok = [](const Vec2& p) { return p.allFinite(); };
  return std::isfinite(t) && std::all_of(evaders.begin(), evaders.end(), ok) &&
         std::all_of(herders.begin(), herders.end(), ok);
}

std::vector<std::string> ScenarioConfig::validate() const {
  auto fail = [](const std::string& msg) { throw HerdingError(ErrorCode::ConfigError, msg); };

  if (m == 0 || n == 0) fail("m and n must be positive");
  if (!(gains.kappa_H > 0.0) || !(gains.gamma_h > 0.0) || !(gains.gamma_a > 0.0) || !(gains.mu > 0.0))
    fail("gains kappa_H, gamma_h, gamma_a and mu must be strictly positive");
  if (!(gains.alpha_split > 0.0 && gains.alpha_split < 1.0)) fail("alpha_split must lie in (0, 1)");
  if (!goal_center.allFinite()) fail("goal_center must be finite");
  if (!(goal_radius > 0.0)) fail("goal_radius must be positive");
  if (!(r_avoid > 0.0)) fail("r_avoid must be positive");
  if (!(r_avoid < 2.0 * goal_radius)) fail("r_avoid must be smaller than twice goal_radius");
  if (!(v_max > 0.0)) fail("v_max must be positive");
  if (neighbor_dist && !(*neighbor_dist > 0.0)) fail("neighbor_dist must be positive or \"unbounded\"");
  if (!(dt > 0.0) || dt > 0.05) fail("dt must lie in (0, 0.05]");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) fail("t_max must be finite and non-negative");
  if (!(hold_time >= 0.0) || !std::isfinite(hold_time)) fail("hold_time must be finite and non-negative");
  if (!(singularity_eps > 0.0)) fail("singularity_eps must be positive");
  if (!(perturbation.stall_speed >= 0.0) || !(perturbation.dwell >= 0.0) || !(perturbation.magnitude >= 0.0))
    fail("perturbation settings must be non-negative");
  if (initial_evaders.size() != m) fail("initial_evaders must hold m positions");
  if (initial_herders.size() != n) fail("initial_herders must hold n positions");
  auto finite = [](const Vec2& p) { return p.allFinite(); };
  if (!std::all_of(initial_evaders.begin(), initial_evaders.end(), finite) ||
      !std::all_of(initial_herders.begin(), initial_herders.end(), finite))
    fail("initial positions must be finite");

  std::vector<std::string> warnings;
  const double half = 0.5 * r_avoid;
  if (std::numbers::pi * goal_radius * goal_radius < static_cast<double>(m) * std::numbers::pi * half * half)
    warnings.emplace_back("goal region may be too small to hold every evader");
  if (m != n) warnings.emplace_back("controllers require m == n; runs will fail with CountMismatch");
  return warnings;
}

WorldState ScenarioConfig::initial_state() const {
  return WorldState{0.0, initial_evaders, initial_herders};
}

ScenarioConfig default_scenario() {
  ScenarioConfig cfg;
  cfg.initial_evaders = {Vec2(5.0, 5.0), Vec2(7.0, 3.0), Vec2(6.0, 7.0)};
  cfg.initial_herders = {Vec2(1.0, 9.0), Vec2(2.0, 2.0), Vec2(9.0, 1.0)};
  return cfg;
}

std::vector<std::size_t> Assignment::evader_to_herder() const {
  std::vector<std::size_t> inv(herder_to_evader.size(), 0);
  for (std::size_t k = 0; k < herder_to_evader.size(); ++k) {
    if (herder_to_evader[k] < inv.size()) inv[herder_to_evader[k]] = k;
  }
  return inv;
}

bool Assignment::is_bijection(std::size_t evader_count) const {
  if (herder_to_evader.size() != evader_count) return false;
  std::vector<bool> seen(evader_count, false);
  for (auto i : herder_to_evader) {
    if (i >= evader_count || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

bool in_goal_region(const Vec2& p, const ScenarioConfig& cfg) {
  return (p - cfg.goal_center).squaredNorm() <= cfg.goal_radius * cfg.goal_radius;
}

double pair_clearance(const Vec2& xi, const Vec2& xj, const ScenarioConfig& cfg) {
  return (xi - xj).squaredNorm() - cfg.r_avoid * cfg.r_avoid;
}

namespace {

constexpr std::size_t kExhaustiveLimit = 8;

Assignment exhaustive_assignment(const WorldState& state) {
  const std::size_t n = state.herders.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);

  std::vector<std::size_t> best = perm;
  double best_cost = std::numeric_limits<double>::infinity();
  // Lexicographic enumeration plus strict improvement keeps the lowest-index optimum on ties.
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) cost += (state.herders[k] - state.evaders[perm[k]]).norm();
    if (!std::isfinite(best_cost) || cost < best_cost - 1e-12 * std::max(1.0, best_cost)) {
      best_cost = cost;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return Assignment{best};
}

Assignment greedy_assignment(const WorldState& state) {
  const std::size_t n = state.herders.size();
  std::vector<bool> taken(n, false);
  Assignment out;
  out.herder_to_evader.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t pick = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      const double dist = (state.herders[k] - state.evaders[i]).norm();
      if (dist < best) {
        best = dist;
        pick = i;
      }
    }
    taken[pick] = true;
    out.herder_to_evader.push_back(pick);
  }
  return out;
}

}  // namespace

Assignment nearest_assignment(const WorldState& state) {
  if (state.evaders.size() != state.herders.size()) {
    throw HerdingError(ErrorCode::CountMismatch, "nearest assignment needs as many herders as evaders");
  }
  if (state.herders.size() <= kExhaustiveLimit) return exhaustive_assignment(state);
  return greedy_assignment(state);
}

}  // namespace herding
