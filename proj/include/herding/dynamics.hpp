#pragma once

#include "herding/model.hpp"

#include <span>
#include <vector>

namespace herding::dynamics {

/// Inverse-square repulsion felt by evader i, with every herder distance floored at eps.
Vec2 evader_field(std::size_t i, const WorldState& state, const ControlGains& gains, double eps);

/// Field for every evader, each clamped to v_max (the velocity the evaders actually move with).
std::vector<Vec2> evader_velocities(const WorldState& state, const ScenarioConfig& cfg);

/// d f_i / d x_Ei, summed over all herders.
Jacobian2 evader_jacobian_self(std::size_t i, const WorldState& state, const ControlGains& gains, double eps);

/// d f_i / d x_Hk. Exact mode keeps only herder k's summand; literal mode is -evader_jacobian_self.
Jacobian2 evader_jacobian_herder(std::size_t i, std::size_t k, const WorldState& state, const ScenarioConfig& cfg);

/// Norm clamp that preserves direction.
Vec2 saturate(const Vec2& v, double v_max);

/// One classical RK4 step of the coupled system. Herder velocities are held at u_H.
WorldState step(const WorldState& state, std::span<const Vec2> u_H, const ScenarioConfig& cfg);

}  // namespace herding::dynamics
