#pragma once

#include "herding/barrier.hpp"
#include "herding/model.hpp"
#include "herding/qp.hpp"

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace herding::controller {

struct HerderRecord {
  std::size_t evader = 0;
  barrier::GoalBarrierTerms goal;
  Vec2 u_nom = Vec2::Zero();
  Vec2 u_filtered = Vec2::Zero();  // safety-filter output before perturbation and clamping
  qp::QpSolution qp;               // for the centralized path, a copy of the joint solution
  std::vector<std::pair<std::size_t, std::size_t>> constraints_used;
  bool perturbed = false;
  bool clamped = false;
};

struct ControlDecision {
  std::vector<Vec2> u_H;
  std::vector<HerderRecord> per_herder;
  std::vector<barrier::PairBarrierTerms> pairs;  // canonical pairs inside the neighborhood
  std::vector<Vec2> v_E;
  Assignment assignment;
  double min_c = 0.0;  // +inf when no pair is constrained

  bool any_relaxed() const;
};

/// Mutable state the controller carries between steps: dwell timers and the step counter
/// used to derive per-herder random streams from the scenario seed.
struct ControllerMemory {
  std::vector<double> stall_time;
  std::uint64_t step = 0;
};

/// Random stream for herder k at control step `step`; independent of evaluation order.
std::mt19937_64 herder_stream(std::uint64_t seed, std::uint64_t step, std::size_t k);

Vec2 sontag_nominal(const barrier::GoalBarrierTerms& terms);

std::vector<std::size_t> neighborhood(std::size_t i, const WorldState& state, const ScenarioConfig& cfg);

struct PerturbResult {
  Vec2 u = Vec2::Zero();
  bool perturbed = false;
};

/// Adds a random kick of fixed magnitude once the command has stayed below stall_speed for
/// `dwell` seconds while the assigned evader is still outside the goal. `stall_time` is the
/// herder's dwell timer and is advanced by cfg.dt.
PerturbResult perturb_if_stalled(const Vec2& u, bool evader_in_goal, double& stall_time, const ScenarioConfig& cfg,
                                 std::mt19937_64& rng);

ControlDecision decentralized_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory);
ControlDecision centralized_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory);

/// Dispatches on cfg.mode.
ControlDecision control_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory);

}  // namespace herding::controller
