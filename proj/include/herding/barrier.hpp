#pragma once

#include "herding/model.hpp"

#include <span>
#include <vector>

namespace herding::barrier {

/// Goal-reaching constraint a + b.u_k >= 0 for one evader and its herder.
struct GoalBarrierTerms {
  double a = 0.0;
  Vec2 b = Vec2::Zero();
  double h1_pos = 0.0;
  double h1_full = 0.0;
};

/// Pairwise avoidance constraint c + d.(u_k - u_q) >= 0 for evaders i < j,
/// where herder k drives evader i and herder q drives evader j.
struct PairBarrierTerms {
  std::size_t i = 0, j = 0;
  std::size_t k = 0, q = 0;
  double c = 0.0;
  Vec2 d = Vec2::Zero();
  double h2_pos = 0.0;
  double h2_full = 0.0;
};

/// One half-plane offset + normal.u >= 0 on a single herder's input.
struct LinearConstraint {
  double offset = 0.0;
  Vec2 normal = Vec2::Zero();
};

struct SplitConstraints {
  LinearConstraint first;   // herder k
  LinearConstraint second;  // herder q
};

double h1_pos(const Vec2& x_Ei, const ScenarioConfig& cfg);
Vec2 r_h(const Vec2& x_Ei, const ScenarioConfig& cfg);
double h1_full(const Vec2& x_Ei, const Vec2& v_Ei, const ScenarioConfig& cfg);

double h2_pos(const Vec2& x_Ei, const Vec2& x_Ej, const ScenarioConfig& cfg);
Vec2 r_a(const Vec2& x_Eij, const ControlGains& gains);
double h2_full(const Vec2& x_Eij, const Vec2& v_Eij, const ScenarioConfig& cfg);

/// v_E holds the current evader velocities, one per evader.
GoalBarrierTerms goal_terms(std::size_t i, std::size_t k, const WorldState& state, std::span<const Vec2> v_E,
                            const ScenarioConfig& cfg);

/// Throws SamePairHerder when k == q.
PairBarrierTerms pair_terms(std::size_t i, std::size_t j, std::size_t k, std::size_t q, const WorldState& state,
                            std::span<const Vec2> v_E, const ScenarioConfig& cfg);

/// Distributes c between the two herders as alpha*c and (1 - alpha)*c.
SplitConstraints split_conditions(const PairBarrierTerms& terms, double alpha_split);

struct PairResidual {
  std::size_t i = 0, j = 0;
  double value = 0.0;
};

struct ResidualReport {
  std::vector<double> goal;          // a + b.u_k per evader
  std::vector<PairResidual> pairs;   // c + d.(u_k - u_q) per canonical pair
};

/// Left-hand sides of the full backstepping conditions under the applied commands u_H.
ResidualReport cbf_residuals(const WorldState& state, std::span<const Vec2> v_E, std::span<const Vec2> u_H,
                             const Assignment& assignment, const ScenarioConfig& cfg);

}  // namespace herding::barrier
