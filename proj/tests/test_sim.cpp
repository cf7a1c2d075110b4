#include "herding/error.hpp"
#include "herding/sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace herding;

namespace {

ScenarioConfig single_in_goal() {
  auto cfg = default_scenario();
  cfg.initial_evaders = {cfg.goal_center + Vec2(0.5, -0.5)};
  cfg.initial_herders = {Vec2(-4000, 0)};
  cfg.m = cfg.n = 1;
  return cfg;
}

ScenarioConfig short_default(ControlMode mode, double t_max) {
  auto cfg = default_scenario();
  cfg.mode = mode;
  cfg.t_max = t_max;
  return cfg;
}

}  // namespace

TEST_CASE("already-complete task finishes after one hold window") {
  const auto cfg = single_in_goal();
  const auto log = sim::run(cfg);
  REQUIRE_FALSE(log.summary.error);
  CHECK(log.summary.success);
  CHECK(log.summary.t_end == doctest::Approx(cfg.hold_time));
  REQUIRE(log.summary.time_to_goal);
  CHECK(*log.summary.time_to_goal == doctest::Approx(0.0));
  CHECK((log.records.back().evaders[0] - cfg.initial_evaders[0]).norm() <= cfg.hold_time * 1e-6);
  CHECK(log.pairs.empty());
  CHECK(std::isinf(log.summary.min_h2_pos));

  const auto report = sim::metrics(log, cfg.hold_time);
  CHECK(report.h2_pos.empty());
  CHECK(report.final_h2_pos.empty());
  CHECK(report.h1_pos.size() == 1);
}

TEST_CASE("zero horizon produces an empty, unsuccessful log") {
  auto cfg = default_scenario();
  cfg.t_max = 0.0;
  const auto log = sim::run(cfg);
  CHECK(log.records.empty());
  CHECK_FALSE(log.summary.success);
  CHECK(log.summary.steps == 0);
  try {
    sim::metrics(log, cfg.hold_time);
    FAIL("expected EmptyLog");
  } catch (const HerdingError& e) {
    CHECK(e.code() == ErrorCode::EmptyLog);
  }
}

TEST_CASE("invalid configs are rejected before running") {
  auto cfg = default_scenario();
  cfg.dt = -1.0;
  CHECK_THROWS_AS(sim::run(cfg), HerdingError);
}

TEST_CASE("records advance by dt and summaries match the series") {
  for (auto mode : {ControlMode::Decentralized, ControlMode::Centralized}) {
    const auto cfg = short_default(mode, 4.0);
    const auto log = sim::run(cfg);
    REQUIRE_FALSE(log.summary.error);
    REQUIRE(log.records.size() == 400);
    CHECK(log.summary.steps == 400);
    for (std::size_t s = 0; s < log.records.size(); ++s) {
      CHECK(log.records[s].t == doctest::Approx(s * cfg.dt).epsilon(1e-12));
    }
    CHECK(log.pairs.size() == 3);

    double min_h2 = INFINITY, min_full = INFINITY, min_c = INFINITY;
    std::size_t relaxed = 0;
    for (const auto& r : log.records) {
      CHECK(r.h2_pos.size() == 3);
      CHECK(r.d_safe.size() == 3);
      CHECK(r.h1_pos.size() == 3);
      for (double v : r.h2_pos) min_h2 = std::min(min_h2, v);
      for (double v : r.h2_full) min_full = std::min(min_full, v);
      for (std::size_t k = 0; k < 3; ++k) CHECK(r.u_H[k].norm() <= cfg.v_max + 1e-12);
      for (std::size_t p = 0; p < 3; ++p) {
        const auto [i, j] = log.pairs[p];
        CHECK(r.d_safe[p] == doctest::Approx((r.evaders[i] - r.evaders[j]).norm()));
        CHECK(r.h2_pos[p] == doctest::Approx(r.d_safe[p] * r.d_safe[p] - cfg.r_avoid * cfg.r_avoid));
      }
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(r.d_goal[i] == doctest::Approx((r.evaders[i] - cfg.goal_center).norm() - cfg.goal_radius));
      }
      min_c = std::min(min_c, r.min_c);
      relaxed += r.relaxed;
    }
    CHECK(log.summary.min_h2_pos == min_h2);
    CHECK(log.summary.min_h2_full == min_full);
    CHECK(log.summary.min_c == min_c);
    CHECK((relaxed == 0) == (log.summary.relax_count == 0));

    const auto report = sim::metrics(log, cfg.hold_time);
    double series_min = INFINITY;
    for (const auto& s : report.h2_pos) series_min = std::min(series_min, *std::min_element(s.begin(), s.end()));
    CHECK(series_min == log.summary.min_h2_pos);
    CHECK(report.t.size() == log.records.size());
    CHECK(report.window_start == doctest::Approx(4.0 - cfg.hold_time));
  }
}

TEST_CASE("runs are deterministic") {
  const auto cfg = short_default(ControlMode::Decentralized, 3.0);
  const auto a = sim::run(cfg);
  const auto b = sim::run(cfg);
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t s = 0; s < a.records.size(); ++s) {
    for (std::size_t k = 0; k < 3; ++k) {
      CHECK(a.records[s].evaders[k] == b.records[s].evaders[k]);
      CHECK(a.records[s].herders[k] == b.records[s].herders[k]);
      CHECK(a.records[s].u_H[k] == b.records[s].u_H[k]);
    }
  }
}

TEST_CASE("full reference runs herd safely") {
  for (auto mode : {ControlMode::Decentralized, ControlMode::Centralized}) {
    const auto cfg = short_default(mode, 60.0);
    const auto log = sim::run(cfg);
    REQUIRE_FALSE(log.summary.error);
    CHECK(log.summary.success);
    CHECK(log.summary.min_h2_pos > 0.0);
    CHECK(log.summary.max_herder_path <= cfg.v_max * cfg.t_max);
    CHECK(std::isfinite(log.summary.max_herder_path));

    const auto report = sim::metrics(log, cfg.hold_time);
    for (const auto& w : report.final_h1_pos) {
      CHECK(w.min >= 0.0);
      CHECK(w.max <= cfg.goal_radius * cfg.goal_radius);
    }
    // Every record inside the hold window has all evaders in the goal.
    for (const auto& r : log.records) {
      if (r.t < *log.summary.time_to_goal + cfg.dt / 2) continue;
      for (double h : r.h1_pos) CHECK(h >= 0.0);
    }
  }
}
