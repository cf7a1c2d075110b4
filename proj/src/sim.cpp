#include "herding/sim.hpp"

#include "herding/barrier.hpp"
#include "herding/controller.hpp"
#include "herding/dynamics.hpp"
#include "herding/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace herding::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

long long steps_for(double duration, double dt) {
  if (duration <= 0.0) return 0;
  return static_cast<long long>(std::ceil(duration / dt - 1e-9));
}

StepRecord make_record(const WorldState& state, const controller::ControlDecision& decision,
                       const std::vector<std::pair<std::size_t, std::size_t>>& pairs, const ScenarioConfig& cfg) {
  StepRecord rec;
  rec.t = state.t;
  rec.evaders = state.evaders;
  rec.herders = state.herders;
  rec.u_H = decision.u_H;
  for (std::size_t i = 0; i < state.evaders.size(); ++i) {
    const Vec2& x = state.evaders[i];
    rec.h1_pos.push_back(barrier::h1_pos(x, cfg));
    rec.h1_full.push_back(barrier::h1_full(x, decision.v_E[i], cfg));
    rec.d_goal.push_back((x - cfg.goal_center).norm() - cfg.goal_radius);
  }
  for (const auto& [i, j] : pairs) {
    const Vec2 x_ij = state.evaders[i] - state.evaders[j];
    rec.h2_pos.push_back(barrier::h2_pos(state.evaders[i], state.evaders[j], cfg));
    rec.h2_full.push_back(barrier::h2_full(x_ij, decision.v_E[i] - decision.v_E[j], cfg));
    rec.d_safe.push_back(x_ij.norm());
  }
  rec.relaxed = decision.any_relaxed();
  rec.min_c = decision.min_c;
  return rec;
}

bool all_in_goal(const WorldState& state, const ScenarioConfig& cfg) {
  return std::all_of(state.evaders.begin(), state.evaders.end(),
                     [&](const Vec2& p) { return in_goal_region(p, cfg); });
}

}  // namespace

TrajectoryLog run(const ScenarioConfig& cfg) {
  for (const auto& w : cfg.validate()) spdlog::warn("config: {}", w);

  TrajectoryLog log;
  log.m = cfg.m;
  log.n = cfg.n;
  for (std::size_t i = 0; i < cfg.m; ++i) {
    for (std::size_t j = i + 1; j < cfg.m; ++j) log.pairs.emplace_back(i, j);
  }

  auto& summary = log.summary;
  summary.min_h2_pos = kInf;
  summary.min_h2_full = kInf;
  summary.min_c = kInf;

  WorldState state = cfg.initial_state();
  controller::ControllerMemory memory;
  std::vector<double> path(cfg.n, 0.0);

  const long long total = steps_for(cfg.t_max, cfg.dt);
  const long long hold_steps = steps_for(cfg.hold_time, cfg.dt);
  long long hold_start = all_in_goal(state, cfg) ? 0 : -1;

  try {
    for (long long s = 0; s < total; ++s) {
      const auto decision = controller::control_step(state, cfg, memory);
      auto rec = make_record(state, decision, log.pairs, cfg);

      for (const auto& h : decision.per_herder) {
        summary.clamp_count += h.clamped ? 1 : 0;
        summary.perturb_count += h.perturbed ? 1 : 0;
      }
      if (cfg.mode == ControlMode::Centralized) {
        summary.relax_count += rec.relaxed ? 1 : 0;
      } else {
        for (const auto& h : decision.per_herder) summary.relax_count += h.qp.relaxed ? 1 : 0;
      }
      for (double v : rec.h2_pos) summary.min_h2_pos = std::min(summary.min_h2_pos, v);
      for (double v : rec.h2_full) summary.min_h2_full = std::min(summary.min_h2_full, v);
      summary.min_c = std::min(summary.min_c, rec.min_c);
      for (std::size_t k = 0; k < cfg.n; ++k) path[k] += decision.u_H[k].norm() * cfg.dt;
      log.records.push_back(std::move(rec));

      state = dynamics::step(state, decision.u_H, cfg);
      state.t = static_cast<double>(s + 1) * cfg.dt;
      summary.steps = static_cast<std::size_t>(s + 1);
      summary.t_end = state.t;

      if (all_in_goal(state, cfg)) {
        if (hold_start < 0) hold_start = s + 1;
        if (s + 1 - hold_start >= hold_steps) {
          summary.success = true;
          summary.time_to_goal = static_cast<double>(hold_start) * cfg.dt;
          break;
        }
      } else {
        hold_start = -1;
      }
    }
  } catch (const HerdingError& e) {
    spdlog::error("run aborted at t = {:.3f}: {}", state.t, e.what());
    summary.success = false;
    summary.error = e.what();
  }
  summary.max_herder_path = path.empty() ? 0.0 : *std::max_element(path.begin(), path.end());
  return log;
}

MetricsReport metrics(const TrajectoryLog& log, double hold_time) {
  if (log.records.empty()) throw HerdingError(ErrorCode::EmptyLog, "no steps were recorded");

  MetricsReport out;
  out.summary = log.summary;
  out.h1_pos.assign(log.m, {});
  out.d_goal.assign(log.m, {});
  out.h2_pos.assign(log.pairs.size(), {});
  out.d_safe.assign(log.pairs.size(), {});
  for (const auto& rec : log.records) {
    out.t.push_back(rec.t);
    for (std::size_t i = 0; i < log.m; ++i) {
      out.h1_pos[i].push_back(rec.h1_pos[i]);
      out.d_goal[i].push_back(rec.d_goal[i]);
    }
    for (std::size_t p = 0; p < log.pairs.size(); ++p) {
      out.h2_pos[p].push_back(rec.h2_pos[p]);
      out.d_safe[p].push_back(rec.d_safe[p]);
    }
  }

  // Records hold the state each command was computed from, so the last one sits one dt before t_end.
  out.window_start = log.summary.t_end - hold_time;
  auto window = [&](const std::vector<double>& series) {
    WindowStats w{0.0, kInf, -kInf};
    std::size_t count = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (out.t[s] < out.window_start - 1e-9) continue;
      w.mean += series[s];
      w.min = std::min(w.min, series[s]);
      w.max = std::max(w.max, series[s]);
      ++count;
    }
    w.mean /= static_cast<double>(count);
    return w;
  };
  for (const auto& s : out.h1_pos) out.final_h1_pos.push_back(window(s));
  for (const auto& s : out.h2_pos) out.final_h2_pos.push_back(window(s));
  return out;
}

}  // namespace herding::sim
