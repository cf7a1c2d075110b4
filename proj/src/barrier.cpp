#include "herding/barrier.hpp"

#include "herding/dynamics.hpp"
#include "herding/error.hpp"

namespace herding::barrier {

double h1_pos(const Vec2& x_Ei, const ScenarioConfig& cfg) {
  return cfg.goal_radius * cfg.goal_radius - (x_Ei - cfg.goal_center).squaredNorm();
}

Vec2 r_h(const Vec2& x_Ei, const ScenarioConfig& cfg) {
  return -cfg.gains.gamma_h * (x_Ei - cfg.goal_center);
}

double h1_full(const Vec2& x_Ei, const Vec2& v_Ei, const ScenarioConfig& cfg) {
  return h1_pos(x_Ei, cfg) - (v_Ei - r_h(x_Ei, cfg)).squaredNorm() / (2.0 * cfg.gains.mu);
}

double h2_pos(const Vec2& x_Ei, const Vec2& x_Ej, const ScenarioConfig& cfg) {
  return pair_clearance(x_Ei, x_Ej, cfg);
}

Vec2 r_a(const Vec2& x_Eij, const ControlGains& gains) { return gains.gamma_a * x_Eij; }

double h2_full(const Vec2& x_Eij, const Vec2& v_Eij, const ScenarioConfig& cfg) {
  const double pos = x_Eij.squaredNorm() - cfg.r_avoid * cfg.r_avoid;
  return pos - (v_Eij - r_a(x_Eij, cfg.gains)).squaredNorm() / (2.0 * cfg.gains.mu);
}

GoalBarrierTerms goal_terms(std::size_t i, std::size_t k, const WorldState& state, std::span<const Vec2> v_E,
                            const ScenarioConfig& cfg) {
  const auto& g = cfg.gains;
  const Vec2& x = state.evaders[i];
  const Vec2& v = v_E[i];
  const Vec2 offset = x - cfg.goal_center;
  const Vec2 deviation = v - r_h(x, cfg);

  const Jacobian2 j_self = dynamics::evader_jacobian_self(i, state, g, cfg.singularity_eps);
  const Jacobian2 j_herder = dynamics::evader_jacobian_herder(i, k, state, cfg);

  GoalBarrierTerms t;
  t.h1_pos = h1_pos(x, cfg);
  t.h1_full = t.h1_pos - deviation.squaredNorm() / (2.0 * g.mu);
  t.a = -2.0 * offset.dot(v) + g.gamma_h * t.h1_full - deviation.dot(j_self * v + g.gamma_h * v) / g.mu;
  t.b = -(j_herder.transpose() * deviation) / g.mu;
  return t;
}

PairBarrierTerms pair_terms(std::size_t i, std::size_t j, std::size_t k, std::size_t q, const WorldState& state,
                            std::span<const Vec2> v_E, const ScenarioConfig& cfg) {
  if (k == q) {
    throw HerdingError(ErrorCode::SamePairHerder,
                       "evaders " + std::to_string(i) + " and " + std::to_string(j) + " share herder " +
                           std::to_string(k));
  }
  const auto& g = cfg.gains;
  const double eps = cfg.singularity_eps;
  const Vec2 x_ij = state.evaders[i] - state.evaders[j];
  const Vec2 v_ij = v_E[i] - v_E[j];
  const Vec2 deviation = v_ij - r_a(x_ij, g);

  const Jacobian2 dfdx =
      dynamics::evader_jacobian_self(i, state, g, eps) - dynamics::evader_jacobian_self(j, state, g, eps);
  const Jacobian2 dfdh =
      dynamics::evader_jacobian_herder(i, k, state, cfg) - dynamics::evader_jacobian_herder(j, q, state, cfg);

  PairBarrierTerms t;
  t.i = i;
  t.j = j;
  t.k = k;
  t.q = q;
  t.h2_pos = x_ij.squaredNorm() - cfg.r_avoid * cfg.r_avoid;
  t.h2_full = t.h2_pos - deviation.squaredNorm() / (2.0 * g.mu);
  t.c = 2.0 * x_ij.dot(v_ij) + g.gamma_a * t.h2_full - deviation.dot(dfdx * v_ij - g.gamma_a * v_ij) / g.mu;
  t.d = -(dfdh.transpose() * deviation) / g.mu;
  return t;
}

SplitConstraints split_conditions(const PairBarrierTerms& terms, double alpha_split) {
  return SplitConstraints{
      LinearConstraint{alpha_split * terms.c, terms.d},
      LinearConstraint{(1.0 - alpha_split) * terms.c, -terms.d},
  };
}

ResidualReport cbf_residuals(const WorldState& state, std::span<const Vec2> v_E, std::span<const Vec2> u_H,
                             const Assignment& assignment, const ScenarioConfig& cfg) {
  const std::size_t m = state.evaders.size();
  const auto herder_of = assignment.evader_to_herder();

  ResidualReport report;
  report.goal.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t k = herder_of[i];
    const auto t = goal_terms(i, k, state, v_E, cfg);
    report.goal[i] = t.a + t.b.dot(u_H[k]);
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const auto t = pair_terms(i, j, herder_of[i], herder_of[j], state, v_E, cfg);
      report.pairs.push_back({i, j, t.c + t.d.dot(u_H[t.k] - u_H[t.q])});
    }
  }
  return report;
}

}  // namespace herding::barrier
