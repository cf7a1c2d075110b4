#include "herding/qp.hpp"

#include "herding/error.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace herding::qp {

namespace {

constexpr double kZeroRow = 1e-12;
constexpr double kFeasTol = 1e-10;
constexpr double kActiveTol = 1e-9;
constexpr double kSingularDet = 1e-12;

// Rows rescaled to unit normals. Vacuous zero rows are dropped; contradictory zero rows
// are kept aside so the caller can route to the relaxation.
struct NormalizedRows {
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
  std::vector<std::size_t> source;  // original row index per kept row
  std::vector<double> scale;        // original row norm per kept row
  std::vector<std::size_t> contradictory;
};

NormalizedRows normalize(const QpProblem& p) {
  const auto rows = static_cast<std::size_t>(p.G.rows());
  NormalizedRows out;
  std::vector<std::size_t> keep;
  for (std::size_t r = 0; r < rows; ++r) {
    const double norm = p.G.row(static_cast<Eigen::Index>(r)).norm();
    if (norm < kZeroRow) {
      if (p.h(static_cast<Eigen::Index>(r)) > 0.0) out.contradictory.push_back(r);
      continue;
    }
    keep.push_back(r);
    out.scale.push_back(norm);
  }
  out.G.resize(static_cast<Eigen::Index>(keep.size()), p.G.cols());
  out.h.resize(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t r = 0; r < keep.size(); ++r) {
    const auto src = static_cast<Eigen::Index>(keep[r]);
    out.G.row(static_cast<Eigen::Index>(r)) = p.G.row(src) / out.scale[r];
    out.h(static_cast<Eigen::Index>(r)) = p.h(src) / out.scale[r];
  }
  out.source = std::move(keep);
  return out;
}

double tol_for(double offset, double base) { return base * std::max(1.0, std::abs(offset)); }

bool feasible(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& u) {
  for (Eigen::Index r = 0; r < G.rows(); ++r) {
    if (G.row(r).dot(u) < h(r) - tol_for(h(r), kFeasTol)) return false;
  }
  return true;
}

struct Certificate {
  std::vector<std::size_t> active;  // normalized row indices
  Eigen::VectorXd lambda;           // per normalized row
  double residual = 0.0;
};

// Solves u - u_nom = G_S^T lambda in the least-squares sense for one subset S of rows.
std::pair<Eigen::VectorXd, double> stationarity(const Eigen::MatrixXd& G, const std::vector<std::size_t>& subset,
                                                const Eigen::VectorXd& step) {
  if (subset.empty()) return {Eigen::VectorXd(), step.norm()};
  Eigen::MatrixXd N(G.cols(), static_cast<Eigen::Index>(subset.size()));
  for (std::size_t c = 0; c < subset.size(); ++c) {
    N.col(static_cast<Eigen::Index>(c)) = G.row(static_cast<Eigen::Index>(subset[c])).transpose();
  }
  Eigen::VectorXd lambda = N.completeOrthogonalDecomposition().solve(step);
  return {lambda, (N * lambda - step).norm()};
}

// KKT certificate for a candidate: multipliers on the tight rows, stationarity residual,
// primal infeasibility and negative multipliers all folded into one number.
Certificate certify(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& u_nom,
                    const Eigen::VectorXd& u) {
  Certificate cert;
  cert.lambda = Eigen::VectorXd::Zero(G.rows());
  double primal = 0.0;
  for (Eigen::Index r = 0; r < G.rows(); ++r) {
    const double slack = G.row(r).dot(u) - h(r);
    primal = std::max(primal, -slack);
    if (std::abs(slack) <= tol_for(h(r), kActiveTol)) cert.active.push_back(static_cast<std::size_t>(r));
  }
  const Eigen::VectorXd step = u - u_nom;
  const auto dim = static_cast<std::size_t>(G.cols());

  auto score = [](const Eigen::VectorXd& lambda, double res) {
    const double neg = lambda.size() ? std::max(0.0, -lambda.minCoeff()) : 0.0;
    return std::max(res, neg);
  };

  auto [lambda, res] = stationarity(G, cert.active, step);
  double best = score(lambda, res);
  std::vector<std::size_t> best_subset = cert.active;
  Eigen::VectorXd best_lambda = lambda;

  // More tight rows than dimensions: search subsets for a non-negative representation.
  if (cert.active.size() > dim && best > 1e-10) {
    const std::size_t count = cert.active.size();
    for (std::size_t mask = 1; mask < (std::size_t{1} << count) && count <= 16; ++mask) {
      std::vector<std::size_t> subset;
      for (std::size_t b = 0; b < count; ++b) {
        if (mask & (std::size_t{1} << b)) subset.push_back(cert.active[b]);
      }
      if (subset.size() > dim) continue;
      auto [l, r] = stationarity(G, subset, step);
      const double s = score(l, r);
      if (s < best) {
        best = s;
        best_subset = subset;
        best_lambda = l;
      }
    }
  }
  for (std::size_t c = 0; c < best_subset.size(); ++c) {
    cert.lambda(static_cast<Eigen::Index>(best_subset[c])) = best_lambda(static_cast<Eigen::Index>(c));
  }
  cert.residual = std::max(best, primal);
  return cert;
}

// Exhaustive candidate search for two decision variables.
std::optional<Eigen::VectorXd> project_planar(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                              const Eigen::VectorXd& u_nom) {
  if (feasible(G, h, u_nom)) return u_nom;

  std::optional<Eigen::VectorXd> best;
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Eigen::VectorXd& u) {
    if (!feasible(G, h, u)) return;
    const double dist = (u - u_nom).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = u;
    }
  };

  const Eigen::Index rows = G.rows();
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Eigen::Vector2d g = G.row(r).transpose();
    consider(u_nom + (h(r) - g.dot(u_nom)) * g);
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index s = r + 1; s < rows; ++s) {
      Eigen::Matrix2d A;
      A.row(0) = G.row(r);
      A.row(1) = G.row(s);
      if (std::abs(A.determinant()) < kSingularDet) continue;  // parallel pair, not a vertex
      consider(A.partialPivLu().solve(Eigen::Vector2d(h(r), h(s))));
    }
  }
  return best;
}

struct DualResult {
  bool feasible = false;
  Eigen::VectorXd u;
};

// Goldfarb-Idnani dual active-set method specialized to the identity Hessian:
// starts at u_nom and adds the most violated row until primal feasibility.
DualResult project_dual(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const Eigen::VectorXd& u_nom) {
  const Eigen::Index dim = G.cols();
  const Eigen::Index rows = G.rows();
  const int budget = 50 * static_cast<int>(rows + dim) + 100;

  Eigen::VectorXd x = u_nom;
  std::vector<Eigen::Index> active;
  std::vector<double> lambda;

  auto violation = [&](Eigen::Index r) { return G.row(r).dot(x) - h(r); };

  int iterations = 0;
  while (true) {
    Eigen::Index p = -1;
    double worst = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (std::find(active.begin(), active.end(), r) != active.end()) continue;
      const double s = violation(r);
      if (s < -tol_for(h(r), kFeasTol) && s < worst) {
        worst = s;
        p = r;
      }
    }
    if (p < 0) return {true, x};

    const Eigen::VectorXd np = G.row(p).transpose();
    double lambda_p = 0.0;
    while (true) {
      if (++iterations > budget) {
        throw HerdingError(ErrorCode::NumericalFailure, "active-set iteration budget exhausted");
      }
      const auto q = static_cast<Eigen::Index>(active.size());
      Eigen::VectorXd r_dir = Eigen::VectorXd::Zero(q);
      Eigen::VectorXd z = np;
      if (q > 0) {
        Eigen::MatrixXd N(dim, q);
        for (Eigen::Index c = 0; c < q; ++c) N.col(c) = G.row(active[static_cast<std::size_t>(c)]).transpose();
        r_dir = (N.transpose() * N).ldlt().solve(N.transpose() * np);
        z = np - N * r_dir;
      }

      double t_dual = std::numeric_limits<double>::infinity();
      std::size_t drop = 0;
      for (std::size_t c = 0; c < active.size(); ++c) {
        const double rc = r_dir(static_cast<Eigen::Index>(c));
        if (rc > 1e-14) {
          const double ratio = lambda[c] / rc;
          if (ratio < t_dual) {
            t_dual = ratio;
            drop = c;
          }
        }
      }
      const double zz = z.squaredNorm();
      const double t_primal = zz > 1e-20 ? -violation(p) / zz : std::numeric_limits<double>::infinity();
      const double t = std::min(t_dual, t_primal);
      if (!std::isfinite(t)) return {false, x};

      for (std::size_t c = 0; c < active.size(); ++c) lambda[c] -= t * r_dir(static_cast<Eigen::Index>(c));
      lambda_p += t;
      if (std::isfinite(t_primal)) x += t * z;

      if (t_primal <= t_dual) {
        active.push_back(p);
        lambda.push_back(lambda_p);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(drop));
      lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(drop));
    }
  }
}

std::optional<Eigen::VectorXd> project(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                       const Eigen::VectorXd& u_nom) {
  if (G.rows() == 0) return u_nom;
  if (G.cols() == 2) return project_planar(G, h, u_nom);
  auto result = project_dual(G, h, u_nom);
  if (!result.feasible) return std::nullopt;
  return result.u;
}

QpSolution finish(const QpProblem& p, const NormalizedRows& rows, const Eigen::VectorXd& u) {
  const auto cert = certify(rows.G, rows.h, p.u_nom, u);
  QpSolution sol;
  sol.u = u;
  sol.slack = Eigen::VectorXd::Zero(p.G.rows());
  sol.multipliers = Eigen::VectorXd::Zero(p.G.rows());
  for (auto r : cert.active) sol.active_set.push_back(rows.source[r]);
  std::sort(sol.active_set.begin(), sol.active_set.end());
  for (std::size_t r = 0; r < rows.source.size(); ++r) {
    sol.multipliers(static_cast<Eigen::Index>(rows.source[r])) = cert.lambda(static_cast<Eigen::Index>(r)) / rows.scale[r];
  }
  sol.kkt_residual = cert.residual;
  return sol;
}

void check_finite(const QpProblem& p) {
  if (!p.u_nom.allFinite() || !p.G.allFinite() || !p.h.allFinite() || p.G.rows() != p.h.size() ||
      p.G.cols() != p.u_nom.size()) {
    throw HerdingError(ErrorCode::NumericalFailure, "malformed or non-finite QP data");
  }
}

}  // namespace

double objective(const QpProblem& problem, const Eigen::VectorXd& u) { return (u - problem.u_nom).squaredNorm(); }

QpSolution solve(const QpProblem& problem) {
  check_finite(problem);
  const auto rows = normalize(problem);
  if (!rows.contradictory.empty()) return relax(problem);
  auto u = project(rows.G, rows.h, problem.u_nom);
  if (!u) return relax(problem);
  return finish(problem, rows, *u);
}

QpSolution relax(const QpProblem& problem, double slack_weight) {
  check_finite(problem);
  const Eigen::Index dim = problem.u_nom.size();
  const Eigen::Index rows = problem.G.rows();
  const double root = std::sqrt(slack_weight);

  // Lifted variables (u, sigma) with sigma = sqrt(weight) * s turn the penalty into a plain
  // projection of (u_nom, 0): rows g.u + sigma / root >= h and sigma >= 0.
  std::vector<double> scale(static_cast<std::size_t>(rows), 1.0);
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(2 * rows, dim + rows);
  Eigen::VectorXd h = Eigen::VectorXd::Zero(2 * rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const double norm = problem.G.row(r).norm();
    const double sc = norm < kZeroRow ? 1.0 : norm;
    scale[static_cast<std::size_t>(r)] = sc;
    if (norm >= kZeroRow) G.block(r, 0, 1, dim) = problem.G.row(r) / sc;
    G(r, dim + r) = 1.0 / root;
    h(r) = problem.h(r) / sc;
    G(rows + r, dim + r) = 1.0;
  }
  Eigen::VectorXd target = Eigen::VectorXd::Zero(dim + rows);
  target.head(dim) = problem.u_nom;

  const auto lifted = project_dual(G, h, target);
  if (!lifted.feasible) {
    throw HerdingError(ErrorCode::NumericalFailure, "relaxed problem reported infeasible");
  }

  QpSolution sol;
  sol.relaxed = true;
  sol.u = lifted.u.head(dim);
  sol.slack = Eigen::VectorXd::Zero(rows);
  sol.multipliers = Eigen::VectorXd::Zero(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    sol.slack(r) = std::max(0.0, lifted.u(dim + r) / root) * scale[static_cast<std::size_t>(r)];
  }
  const auto cert = certify(G, h, target, lifted.u);
  for (auto r : cert.active) {
    if (static_cast<Eigen::Index>(r) < rows) {
      sol.active_set.push_back(r);
      sol.multipliers(static_cast<Eigen::Index>(r)) = cert.lambda(static_cast<Eigen::Index>(r)) / scale[r];
    }
  }
  sol.kkt_residual = cert.residual;
  if (sol.slack.size() > 0 && sol.slack.maxCoeff() > 0.0) {
    spdlog::warn("QP infeasible; relaxed with max slack {:.3e}, safety constraints may be violated",
                 sol.slack.maxCoeff());
  }
  return sol;
}

}  // namespace herding::qp
