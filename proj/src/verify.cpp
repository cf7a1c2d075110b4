#include "herding/verify.hpp"

#include "herding/barrier.hpp"
#include "herding/controller.hpp"
#include "herding/dynamics.hpp"
#include "herding/qp.hpp"
#include "herding/sim.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace herding::verify {

namespace {

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Vec2 uniform_point(std::mt19937_64& rng, double lo, double hi) { return Vec2(uniform(rng, lo, hi), uniform(rng, lo, hi)); }

// Random configuration whose evader-herder distances are all at least min_dist.
WorldState random_world(std::mt19937_64& rng, std::size_t m, std::size_t n, double min_dist) {
  WorldState s;
  for (std::size_t i = 0; i < m; ++i) s.evaders.push_back(uniform_point(rng, -3.0, 3.0));
  while (s.herders.size() < n) {
    const Vec2 h = uniform_point(rng, -3.0, 3.0);
    const bool clear = std::all_of(s.evaders.begin(), s.evaders.end(),
                                   [&](const Vec2& e) { return (e - h).norm() >= min_dist; });
    if (clear) s.herders.push_back(h);
  }
  return s;
}

double relative_error(const Jacobian2& analytic, const Jacobian2& numeric) {
  return (analytic - numeric).norm() / std::max(analytic.norm(), 1e-12);
}

}  // namespace

CheckResult check_jacobian(std::size_t trials, std::uint64_t seed, JacobianMode mode) {
  CheckResult res{"jacobian", true, trials, 0.0, 1e-5, {}};
  std::mt19937_64 rng(seed);
  constexpr double step = 1e-6;
  double literal_gap = 0.0;

  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t n = 1 + rng() % 3;
    ScenarioConfig cfg;
    cfg.gains.kappa_H = uniform(rng, 1.0, 10.0);
    cfg.jacobian_mode = JacobianMode::ExactPerHerder;
    auto world = random_world(rng, 1, n, 0.1);

    auto field_fd = [&](auto perturb) {
      Jacobian2 J;
      for (int c = 0; c < 2; ++c) {
        WorldState plus = world, minus = world;
        perturb(plus, c, step);
        perturb(minus, c, -step);
        J.col(c) = (dynamics::evader_field(0, plus, cfg.gains, cfg.singularity_eps) -
                    dynamics::evader_field(0, minus, cfg.gains, cfg.singularity_eps)) /
                   (2.0 * step);
      }
      return J;
    };

    const Jacobian2 self_fd = field_fd([](WorldState& w, int c, double h) { w.evaders[0](c) += h; });
    res.worst = std::max(res.worst, relative_error(dynamics::evader_jacobian_self(0, world, cfg.gains, cfg.singularity_eps), self_fd));

    for (std::size_t k = 0; k < n; ++k) {
      const Jacobian2 herder_fd = field_fd([k](WorldState& w, int c, double h) { w.herders[k](c) += h; });
      res.worst = std::max(res.worst, relative_error(dynamics::evader_jacobian_herder(0, k, world, cfg), herder_fd));
      if (mode == JacobianMode::PaperLiteral) {
        ScenarioConfig literal = cfg;
        literal.jacobian_mode = JacobianMode::PaperLiteral;
        literal_gap = std::max(literal_gap, relative_error(dynamics::evader_jacobian_herder(0, k, world, literal), herder_fd));
      }
    }
  }
  res.passed = res.worst <= res.threshold;
  if (mode == JacobianMode::PaperLiteral) {
    res.notes.push_back(fmt::format(
        "paper_literal herder Jacobian differs from finite differences by up to {:.3e} (relative) when n > 1; "
        "informational only",
        literal_gap));
  }
  return res;
}

CheckResult check_sontag(std::size_t trials, std::uint64_t seed) {
  CheckResult res{"sontag", true, trials, 0.0, 1e-9, {}};
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < trials; ++t) {
    barrier::GoalBarrierTerms terms;
    terms.a = uniform(rng, -1.0, 1.0) * std::pow(10.0, uniform(rng, -3.0, 3.0));
    Vec2 b;
    do {
      b = uniform_point(rng, -1.0, 1.0) * std::pow(10.0, uniform(rng, -6.0, 3.0));
    } while (b.norm() < 1e-6);
    terms.b = b;
    const Vec2 u = controller::sontag_nominal(terms);
    worst = std::min(worst, terms.a + terms.b.dot(u));
  }
  res.worst = trials ? worst : 0.0;
  res.passed = !trials || worst >= -res.threshold;
  return res;
}

namespace {

// Closest feasible point on the grid lines x = lo + c * step of [lo, -lo]^2. Along each
// line the feasible set is one interval in y, so the per-line optimum is exact.
double grid_sweep(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::Vector2d& u_nom, double lo,
                  double step) {
  const auto cells = static_cast<int>(std::lround(-2.0 * lo / step));
  double best = std::numeric_limits<double>::infinity();
  for (int cx = 0; cx <= cells; ++cx) {
    const double x = lo + cx * step;
    double ylo = lo, yhi = -lo;
    bool empty = false;
    for (Eigen::Index r = 0; r < G.rows() && !empty; ++r) {
      const double gx = G(r, 0), gy = G(r, 1), rhs = h(r) - gx * x;
      if (std::abs(gy) < 1e-15) {
        empty = rhs > 0.0;
      } else if (gy > 0) {
        ylo = std::max(ylo, rhs / gy);
      } else {
        yhi = std::min(yhi, rhs / gy);
      }
    }
    if (empty || ylo > yhi) continue;
    best = std::min(best, (Vec2(x, std::clamp(u_nom.y(), ylo, yhi)) - u_nom).squaredNorm());
  }
  return best;
}

}  // namespace

CheckResult check_qp(std::size_t trials, std::uint64_t seed) {
  CheckResult res{"qp", true, trials, 0.0, 2e-3, {}};
  std::mt19937_64 rng(seed);
  constexpr double lo = -2.0, step = 1e-3;
  double worst_violation = 0.0, worst_kkt = 0.0, worst_below = 0.0;
  std::size_t done = 0;

  while (done < trials) {
    qp::QpProblem p;
    const Vec2 anchor = uniform_point(rng, -1.0, 1.0);
    const auto rows = static_cast<Eigen::Index>(1 + rng() % 6);
    p.u_nom = uniform_point(rng, -1.5, 1.5);
    p.G.resize(rows, 2);
    p.h.resize(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double angle = uniform(rng, 0.0, 2.0 * M_PI);
      const Vec2 normal = uniform(rng, 0.2, 3.0) * Vec2(std::cos(angle), std::sin(angle));
      p.G.row(r) = normal.transpose();
      p.h(r) = normal.dot(anchor) - uniform(rng, 0.0, 0.8);
    }
    const auto sol = qp::solve(p);
    if (sol.u.cwiseAbs().maxCoeff() > 1.9) continue;  // optimum must sit inside the grid

    const double grid_best = std::min(grid_sweep(p.G, p.h, p.u_nom, lo, step),
                                      grid_sweep(p.G.rowwise().reverse(), p.h, p.u_nom.reverse(), lo, step));
    // The grid holds only feasible points, so it bounds the optimum from above; the reverse
    // gap measures grid coarseness near acute corners and is reported separately.
    const double gap = qp::objective(p, sol.u) - grid_best;
    worst_below = std::max(worst_below, -gap);
    res.worst = std::max(res.worst, std::isfinite(gap) ? gap : std::numeric_limits<double>::infinity());
    worst_violation = std::max(worst_violation, (p.h - p.G * sol.u).maxCoeff());
    worst_kkt = std::max(worst_kkt, sol.kkt_residual);
    if (sol.relaxed) res.passed = false;
    ++done;
  }
  res.passed = res.passed && res.worst <= res.threshold && worst_violation <= 1e-9 && worst_kkt <= 1e-8;
  res.notes.push_back(fmt::format("worst constraint violation {:.3e}, worst KKT residual {:.3e}", worst_violation, worst_kkt));
  res.notes.push_back(fmt::format("largest amount the solver beat the grid by {:.3e}", worst_below));
  return res;
}

CheckResult check_invariance(std::size_t trials, std::uint64_t seed) {
  CheckResult res{"invariance", true, trials, 0.0, -1e-3, {}};
  std::mt19937_64 rng(seed);
  double worst = std::numeric_limits<double>::infinity();
  std::size_t accepted = 0, attempts = 0, skipped_relaxed = 0, violating = 0, violating_clamped = 0;

  while (accepted < trials && attempts < 200 * std::max<std::size_t>(trials, 1)) {
    ++attempts;
    ScenarioConfig cfg = default_scenario();
    cfg.t_max = 5.0;
    cfg.hold_time = 10.0;  // run the whole window
    cfg.seed = rng();
    cfg.mode = (attempts % 2) ? ControlMode::Decentralized : ControlMode::Centralized;
    // Reference start with every agent displaced by up to 1 m per axis.
    for (auto& p : cfg.initial_evaders) p += uniform_point(rng, -1.0, 1.0);
    for (auto& p : cfg.initial_herders) p += uniform_point(rng, -1.0, 1.0);
    const WorldState world = cfg.initial_state();

    const auto v = dynamics::evader_velocities(world, cfg);
    bool safe = true;
    for (std::size_t i = 0; i < 3 && safe; ++i) {
      for (std::size_t j = i + 1; j < 3 && safe; ++j) {
        safe = barrier::h2_full(world.evaders[i] - world.evaders[j], v[i] - v[j], cfg) >= 0.0;
      }
    }
    if (!safe) continue;
    const auto log = sim::run(cfg);
    if (log.summary.error) continue;
    if (log.summary.relax_count > 0) {
      ++skipped_relaxed;
      continue;
    }
    worst = std::min(worst, log.summary.min_h2_full);
    if (log.summary.min_h2_full < res.threshold) {
      ++violating;
      violating_clamped += log.summary.clamp_count > 0 ? 1 : 0;
    }
    ++accepted;
  }
  res.trials = accepted;
  res.worst = accepted ? worst : 0.0;
  res.passed = accepted == trials && (!accepted || worst >= res.threshold);
  res.notes.push_back(fmt::format("{} runs accepted from {} draws ({} skipped for relaxation)", accepted, attempts,
                                  skipped_relaxed));
  if (violating > 0) {
    res.notes.push_back(fmt::format("{} runs left the avoidance set; {} of them clamped herder commands", violating,
                                    violating_clamped));
  }
  return res;
}

}  // namespace herding::verify
