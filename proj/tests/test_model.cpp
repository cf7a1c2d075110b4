#include "herding/barrier.hpp"
#include "herding/error.hpp"
#include "herding/model.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <random>

using namespace herding;

namespace {

ScenarioConfig paper_goal() {
  auto cfg = default_scenario();
  cfg.goal_center = Vec2(30.0, 10.0);
  cfg.goal_radius = 3.5;
  return cfg;
}

WorldState world(std::vector<Vec2> evaders, std::vector<Vec2> herders) {
  return WorldState{0.0, std::move(evaders), std::move(herders)};
}

}  // namespace

TEST_CASE("goal membership includes the boundary") {
  const auto cfg = paper_goal();
  CHECK(in_goal_region(cfg.goal_center, cfg));
  CHECK(in_goal_region(Vec2(33.5, 10.0), cfg));
  CHECK_FALSE(in_goal_region(Vec2(34.0, 10.0), cfg));
}

TEST_CASE("pair clearance") {
  auto cfg = default_scenario();
  cfg.r_avoid = 0.5;
  CHECK(pair_clearance(Vec2(1, 2), Vec2(1, 2), cfg) == doctest::Approx(-0.25));
  CHECK(pair_clearance(Vec2(0.5, 0), Vec2(0, 0), cfg) == doctest::Approx(0.0));
  CHECK(pair_clearance(Vec2(1, 0), Vec2(0, 0), cfg) == doctest::Approx(0.75));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int t = 0; t < 200; ++t) {
    const Vec2 a(u(rng), u(rng)), b(u(rng), u(rng));
    CHECK(pair_clearance(a, b, cfg) == pair_clearance(b, a, cfg));
  }
}

TEST_CASE("goal membership agrees with the sign of h1_pos") {
  const auto cfg = paper_goal();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(20, 40);
  for (int t = 0; t < 1000; ++t) {
    const Vec2 p(u(rng), u(rng) - 20.0);
    CHECK(in_goal_region(p, cfg) == (barrier::h1_pos(p, cfg) >= 0.0));
  }
}

TEST_CASE("nearest assignment examples") {
  CHECK(nearest_assignment(world({Vec2(5, 5)}, {Vec2(0, 0)})).herder_to_evader == std::vector<std::size_t>{0});
  CHECK(nearest_assignment(world({Vec2(9, 0), Vec2(1, 0)}, {Vec2(0, 0), Vec2(10, 0)})).herder_to_evader ==
        std::vector<std::size_t>{1, 0});
  // Symmetric tie resolves to the lowest evader index first.
  CHECK(nearest_assignment(world({Vec2(1, 1), Vec2(1, -1)}, {Vec2(0, 0), Vec2(2, 0)})).herder_to_evader ==
        std::vector<std::size_t>{0, 1});
}

TEST_CASE("nearest assignment rejects unequal counts") {
  try {
    nearest_assignment(world({Vec2(0, 0), Vec2(1, 1)}, {Vec2(0, 0)}));
    FAIL("expected CountMismatch");
  } catch (const HerdingError& e) {
    CHECK(e.code() == ErrorCode::CountMismatch);
  }
}

TEST_CASE("nearest assignment is an optimal bijection up to eight agents") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int t = 0; t < 60; ++t) {
    const std::size_t n = 1 + rng() % 6;
    WorldState s;
    for (std::size_t i = 0; i < n; ++i) {
      s.evaders.emplace_back(u(rng), u(rng));
      s.herders.emplace_back(u(rng), u(rng));
    }
    const auto a = nearest_assignment(s);
    REQUIRE(a.is_bijection(n));
    double cost = 0.0;
    for (std::size_t k = 0; k < n; ++k) cost += (s.herders[k] - s.evaders[a.herder_to_evader[k]]).norm();
    CHECK(cost <= oracle::best_matching_cost(s.herders, s.evaders) + 1e-9);
  }
}

TEST_CASE("greedy assignment beyond eight agents is still a bijection") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-10, 10);
  WorldState s;
  for (int i = 0; i < 12; ++i) {
    s.evaders.emplace_back(u(rng), u(rng));
    s.herders.emplace_back(u(rng), u(rng));
  }
  const auto a = nearest_assignment(s);
  CHECK(a.is_bijection(12));
  // Herder 0 chooses first, so it gets its globally nearest evader.
  std::size_t nearest = 0;
  for (std::size_t i = 1; i < 12; ++i) {
    if ((s.herders[0] - s.evaders[i]).norm() < (s.herders[0] - s.evaders[nearest]).norm()) nearest = i;
  }
  CHECK(a.herder_to_evader[0] == nearest);
}

TEST_CASE("config validation") {
  auto cfg = default_scenario();
  CHECK(cfg.validate().empty());

  auto expect_error = [](ScenarioConfig c) {
    try {
      c.validate();
      FAIL("expected ConfigError");
    } catch (const HerdingError& e) {
      CHECK(e.code() == ErrorCode::ConfigError);
    }
  };
  auto bad = cfg;
  bad.gains.alpha_split = 1.0;
  expect_error(bad);
  bad = cfg;
  bad.dt = 0.1;
  expect_error(bad);
  bad = cfg;
  bad.r_avoid = 7.0;
  expect_error(bad);
  bad = cfg;
  bad.initial_herders.pop_back();
  expect_error(bad);
  bad = cfg;
  bad.gains.mu = 0.0;
  expect_error(bad);

  auto crowded = cfg;
  crowded.goal_radius = 0.4;
  crowded.r_avoid = 0.5;
  CHECK(crowded.validate().size() == 1);
}
