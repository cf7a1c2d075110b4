#include "herding/controller.hpp"

#include "herding/dynamics.hpp"
#include "herding/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace herding::controller {

bool ControlDecision::any_relaxed() const {
  return std::any_of(per_herder.begin(), per_herder.end(), [](const HerderRecord& r) { return r.qp.relaxed; });
}

std::mt19937_64 herder_stream(std::uint64_t seed, std::uint64_t step, std::size_t k) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
                    static_cast<std::uint32_t>(k)};
  return std::mt19937_64(seq);
}

Vec2 sontag_nominal(const barrier::GoalBarrierTerms& terms) {
  const double bb = terms.b.squaredNorm();
  if (std::sqrt(bb) < 1e-9) {
    if (terms.a < 0.0) spdlog::warn("goal condition violated with vanishing input coefficient (a = {:.3e})", terms.a);
    return Vec2::Zero();
  }
  const double root = std::hypot(terms.a, bb);
  // Same value as (-a + root) / bb, rearranged to avoid cancellation when a > 0.
  const double gain = terms.a > 0.0 ? bb / (terms.a + root) : (root - terms.a) / bb;
  return gain * terms.b;
}

std::vector<std::size_t> neighborhood(std::size_t i, const WorldState& state, const ScenarioConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < state.evaders.size(); ++j) {
    if (j == i) continue;
    if (!cfg.neighbor_dist || (state.evaders[i] - state.evaders[j]).norm() <= *cfg.neighbor_dist) out.push_back(j);
  }
  return out;
}

PerturbResult perturb_if_stalled(const Vec2& u, bool evader_in_goal, double& stall_time, const ScenarioConfig& cfg,
                                 std::mt19937_64& rng) {
  const auto& p = cfg.perturbation;
  if (u.norm() >= p.stall_speed || evader_in_goal) {
    stall_time = 0.0;
    return {u, false};
  }
  stall_time += cfg.dt;
  if (stall_time + 1e-9 < p.dwell) return {u, false};

  stall_time = 0.0;
  const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double angle = 2.0 * std::numbers::pi * unit;
  return {u + p.magnitude * Vec2(std::cos(angle), std::sin(angle)), true};
}

namespace {

struct Prepared {
  Assignment assignment;
  std::vector<std::size_t> herder_of;
  std::vector<Vec2> v_E;
  std::vector<barrier::GoalBarrierTerms> goal;  // per herder
  std::vector<Vec2> u_nom;                      // per herder
  std::vector<barrier::PairBarrierTerms> pairs;
};

Prepared prepare(const WorldState& state, const ScenarioConfig& cfg) {
  const std::size_t m = state.evaders.size();
  const std::size_t n = state.herders.size();
  if (m != n) throw HerdingError(ErrorCode::CountMismatch, "controllers require as many herders as evaders");

  Prepared p;
  p.assignment = nearest_assignment(state);
  p.herder_of = p.assignment.evader_to_herder();
  p.v_E = dynamics::evader_velocities(state, cfg);
  for (std::size_t k = 0; k < n; ++k) {
    p.goal.push_back(barrier::goal_terms(p.assignment.herder_to_evader[k], k, state, p.v_E, cfg));
    p.u_nom.push_back(sontag_nominal(p.goal.back()));
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j : neighborhood(i, state, cfg)) {
      if (j <= i) continue;
      p.pairs.push_back(barrier::pair_terms(i, j, p.herder_of[i], p.herder_of[j], state, p.v_E, cfg));
    }
  }
  return p;
}

ControlDecision assemble(Prepared&& p) {
  ControlDecision d;
  d.assignment = std::move(p.assignment);
  d.v_E = std::move(p.v_E);
  d.pairs = std::move(p.pairs);
  d.min_c = std::numeric_limits<double>::infinity();
  for (const auto& t : d.pairs) d.min_c = std::min(d.min_c, t.c);
  d.per_herder.resize(p.goal.size());
  for (std::size_t k = 0; k < p.goal.size(); ++k) {
    auto& rec = d.per_herder[k];
    rec.evader = d.assignment.herder_to_evader[k];
    rec.goal = p.goal[k];
    rec.u_nom = p.u_nom[k];
  }
  return d;
}

// Perturbation, then the norm clamp, applied to every herder's filtered command.
void finalize(ControlDecision& d, const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory) {
  const std::size_t n = d.per_herder.size();
  if (memory.stall_time.size() != n) memory.stall_time.assign(n, 0.0);
  d.u_H.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto& rec = d.per_herder[k];
    auto rng = herder_stream(cfg.seed, memory.step, k);
    const bool in_goal = in_goal_region(state.evaders[rec.evader], cfg);
    const auto kicked = perturb_if_stalled(rec.u_filtered, in_goal, memory.stall_time[k], cfg, rng);
    rec.perturbed = kicked.perturbed;
    const Vec2 clamped = dynamics::saturate(kicked.u, cfg.v_max);
    rec.clamped = clamped != kicked.u;
    if (rec.clamped) spdlog::debug("herder {} command clamped from {:.3f} to {:.3f}", k, kicked.u.norm(), cfg.v_max);
    d.u_H[k] = clamped;
  }
  ++memory.step;
}

}  // namespace

ControlDecision decentralized_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory) {
  auto prepared = prepare(state, cfg);
  auto d = assemble(std::move(prepared));
  const double alpha = cfg.gains.alpha_split;

  for (std::size_t k = 0; k < d.per_herder.size(); ++k) {
    auto& rec = d.per_herder[k];
    std::vector<barrier::LinearConstraint> rows;
    for (const auto& t : d.pairs) {
      if (t.k != k && t.q != k) continue;
      const auto split = barrier::split_conditions(t, alpha);
      rows.push_back(t.k == k ? split.first : split.second);
      rec.constraints_used.emplace_back(t.i, t.j);
    }
    qp::QpProblem problem;
    problem.u_nom = rec.u_nom;
    problem.G.resize(static_cast<Eigen::Index>(rows.size()), 2);
    problem.h.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      problem.G.row(static_cast<Eigen::Index>(r)) = rows[r].normal.transpose();
      problem.h(static_cast<Eigen::Index>(r)) = -rows[r].offset;
    }
    rec.qp = qp::solve(problem);
    rec.u_filtered = rec.qp.u;
  }
  finalize(d, state, cfg, memory);
  return d;
}

ControlDecision centralized_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory) {
  auto prepared = prepare(state, cfg);
  auto d = assemble(std::move(prepared));
  const auto n = static_cast<Eigen::Index>(d.per_herder.size());
  const auto rows = static_cast<Eigen::Index>(d.pairs.size());

  qp::QpProblem problem;
  problem.u_nom.resize(2 * n);
  for (Eigen::Index k = 0; k < n; ++k) problem.u_nom.segment<2>(2 * k) = d.per_herder[static_cast<std::size_t>(k)].u_nom;
  problem.G = Eigen::MatrixXd::Zero(rows, 2 * n);
  problem.h.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const auto& t = d.pairs[static_cast<std::size_t>(r)];
    problem.G.block<1, 2>(r, 2 * static_cast<Eigen::Index>(t.k)) = t.d.transpose();
    problem.G.block<1, 2>(r, 2 * static_cast<Eigen::Index>(t.q)) = -t.d.transpose();
    problem.h(r) = -t.c;
    d.per_herder[t.k].constraints_used.emplace_back(t.i, t.j);
    d.per_herder[t.q].constraints_used.emplace_back(t.i, t.j);
  }
  const auto joint = qp::solve(problem);
  for (Eigen::Index k = 0; k < n; ++k) {
    auto& rec = d.per_herder[static_cast<std::size_t>(k)];
    rec.qp = joint;
    rec.u_filtered = joint.u.segment<2>(2 * k);
  }
  finalize(d, state, cfg, memory);
  return d;
}

ControlDecision control_step(const WorldState& state, const ScenarioConfig& cfg, ControllerMemory& memory) {
  return cfg.mode == ControlMode::Centralized ? centralized_step(state, cfg, memory)
                                              : decentralized_step(state, cfg, memory);
}

}  // namespace herding::controller
