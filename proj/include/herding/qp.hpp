#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace herding::qp {

/// min ||u - u_nom||^2  subject to  G u >= h (row-wise).
struct QpProblem {
  Eigen::VectorXd u_nom;
  Eigen::MatrixXd G;
  Eigen::VectorXd h;
};

struct QpSolution {
  Eigen::VectorXd u;
  std::vector<std::size_t> active_set;  // indices into the rows of G
  bool relaxed = false;
  Eigen::VectorXd slack;        // per row, in the row's own units; zero unless relaxed
  Eigen::VectorXd multipliers;  // per row, for u - u_nom = G^T multipliers
  double kkt_residual = 0.0;
};

inline constexpr double kDefaultSlackWeight = 1e4;

/// Euclidean projection of u_nom onto the feasible polyhedron. Falls back to relax()
/// when the polyhedron is empty. Throws NumericalFailure if the iterative path stalls.
QpSolution solve(const QpProblem& problem);

/// Minimizes ||u - u_nom||^2 + weight * ||s||^2 subject to G u >= h - s, s >= 0.
QpSolution relax(const QpProblem& problem, double slack_weight = kDefaultSlackWeight);

double objective(const QpProblem& problem, const Eigen::VectorXd& u);

}  // namespace herding::qp
