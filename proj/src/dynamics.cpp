#include "herding/dynamics.hpp"

#include "herding/error.hpp"

#include <algorithm>
#include <cmath>

namespace herding::dynamics {

namespace {

// kappa * (I / r^3 - 3 d d^T / r^5) for one herder, distance floored at eps.
Jacobian2 pair_jacobian(const Vec2& d, double kappa, double eps) {
  const double r = std::max(d.norm(), eps);
  const double r3 = r * r * r;
  const double r5 = r3 * r * r;
  return kappa * (Jacobian2::Identity() / r3 - 3.0 * (d * d.transpose()) / r5);
}

Vec2 field_at(const Vec2& evader, std::span<const Vec2> herders, double kappa, double eps) {
  Vec2 v = Vec2::Zero();
  for (const auto& h : herders) {
    const Vec2 d = evader - h;
    const double r = std::max(d.norm(), eps);
    v += d / (r * r * r);
  }
  return kappa * v;
}

}  // namespace

Vec2 evader_field(std::size_t i, const WorldState& state, const ControlGains& gains, double eps) {
  return field_at(state.evaders[i], state.herders, gains.kappa_H, eps);
}

std::vector<Vec2> evader_velocities(const WorldState& state, const ScenarioConfig& cfg) {
  std::vector<Vec2> v;
  v.reserve(state.evaders.size());
  for (std::size_t i = 0; i < state.evaders.size(); ++i) {
    v.push_back(saturate(evader_field(i, state, cfg.gains, cfg.singularity_eps), cfg.v_max));
  }
  return v;
}

Jacobian2 evader_jacobian_self(std::size_t i, const WorldState& state, const ControlGains& gains, double eps) {
  Jacobian2 j = Jacobian2::Zero();
  for (const auto& h : state.herders) j += pair_jacobian(state.evaders[i] - h, gains.kappa_H, eps);
  return j;
}

Jacobian2 evader_jacobian_herder(std::size_t i, std::size_t k, const WorldState& state, const ScenarioConfig& cfg) {
  if (cfg.jacobian_mode == JacobianMode::PaperLiteral) {
    return -evader_jacobian_self(i, state, cfg.gains, cfg.singularity_eps);
  }
  return -pair_jacobian(state.evaders[i] - state.herders[k], cfg.gains.kappa_H, cfg.singularity_eps);
}

Vec2 saturate(const Vec2& v, double v_max) {
  const double norm = v.norm();
  if (norm <= v_max) return v;
  return v * (v_max / norm);
}

WorldState step(const WorldState& state, std::span<const Vec2> u_H, const ScenarioConfig& cfg) {
  if (u_H.size() != state.herders.size()) {
    throw HerdingError(ErrorCode::CountMismatch, "one command per herder is required");
  }
  const std::size_t m = state.evaders.size();
  const std::size_t n = state.herders.size();
  const double dt = cfg.dt;
  const double kappa = cfg.gains.kappa_H;
  const double eps = cfg.singularity_eps;

  // Herder velocities are constant over the step, so only the evader stages differ.
  auto evader_rates = [&](std::span<const Vec2> evaders, std::span<const Vec2> herders) {
    std::vector<Vec2> rates(m);
    for (std::size_t i = 0; i < m; ++i) {
      rates[i] = saturate(field_at(evaders[i], herders, kappa, eps), cfg.v_max);
    }
    return rates;
  };
  auto advance = [](std::span<const Vec2> base, std::span<const Vec2> rate, double h) {
    std::vector<Vec2> out(base.size());
    for (std::size_t i = 0; i < base.size(); ++i) out[i] = base[i] + h * rate[i];
    return out;
  };

  const auto k1 = evader_rates(state.evaders, state.herders);
  const auto h_half = advance(state.herders, u_H, 0.5 * dt);
  const auto k2 = evader_rates(advance(state.evaders, k1, 0.5 * dt), h_half);
  const auto k3 = evader_rates(advance(state.evaders, k2, 0.5 * dt), h_half);
  const auto k4 = evader_rates(advance(state.evaders, k3, dt), advance(state.herders, u_H, dt));

  WorldState next;
  next.t = state.t + dt;
  next.evaders.resize(m);
  next.herders.resize(n);
  for (std::size_t i = 0; i < m; ++i) {
    next.evaders[i] = state.evaders[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  for (std::size_t k = 0; k < n; ++k) next.herders[k] = state.herders[k] + dt * u_H[k];

  if (!next.finite()) {
    throw HerdingError(ErrorCode::NonFiniteState, "state became non-finite at t = " + std::to_string(next.t));
  }
  return next;
}

}  // namespace herding::dynamics
