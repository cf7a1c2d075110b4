#pragma once

// Reference computations for the test suites. Nothing here calls into the library's
// numerical code paths; everything is recomputed from the defining formulas.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace oracle {

using V2 = Eigen::Vector2d;
using M2 = Eigen::Matrix2d;

/// Inverse-square repulsion without any distance floor.
inline V2 field(const V2& evader, const std::vector<V2>& herders, double kappa) {
  V2 v = V2::Zero();
  for (const auto& h : herders) {
    const V2 d = evader - h;
    v += d / std::pow(d.norm(), 3);
  }
  return kappa * v;
}

/// Central differences of the field with respect to the evader position.
inline M2 fd_self(const V2& evader, const std::vector<V2>& herders, double kappa, double step = 1e-6) {
  M2 J;
  for (int c = 0; c < 2; ++c) {
    V2 e = V2::Unit(c) * step;
    J.col(c) = (field(evader + e, herders, kappa) - field(evader - e, herders, kappa)) / (2 * step);
  }
  return J;
}

/// Central differences with respect to herder k's position.
inline M2 fd_herder(const V2& evader, std::vector<V2> herders, std::size_t k, double kappa, double step = 1e-6) {
  M2 J;
  const V2 base = herders[k];
  for (int c = 0; c < 2; ++c) {
    herders[k] = base + V2::Unit(c) * step;
    const V2 plus = field(evader, herders, kappa);
    herders[k] = base - V2::Unit(c) * step;
    const V2 minus = field(evader, herders, kappa);
    J.col(c) = (plus - minus) / (2 * step);
  }
  return J;
}

/// Best objective ||u - u_nom||^2 over the grid lo + k*step covering [lo, -lo]^2 subject to
/// G u >= h. Columns are swept exactly: in each column the feasible cells form an interval.
namespace detail {

// Sweeps columns x = lo + c * step; within a column the feasible set is an interval in y,
// so the closest feasible point of that column is found exactly.
inline double column_sweep(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const V2& u_nom, double lo,
                           double step) {
  const int cells = static_cast<int>(std::lround(-2.0 * lo / step));
  double best = std::numeric_limits<double>::infinity();
  for (int cx = 0; cx <= cells; ++cx) {
    const double x = lo + cx * step;
    double ylo = lo, yhi = -lo;
    bool empty = false;
    for (Eigen::Index r = 0; r < G.rows() && !empty; ++r) {
      const double gx = G(r, 0), gy = G(r, 1), rhs = h(r) - gx * x;
      if (std::abs(gy) < 1e-15) empty = rhs > 0.0;
      else if (gy > 0) ylo = std::max(ylo, rhs / gy);
      else yhi = std::min(yhi, rhs / gy);
    }
    if (empty || ylo > yhi) continue;
    const double y = std::clamp(u_nom.y(), ylo, yhi);
    best = std::min(best, (V2(x, y) - u_nom).squaredNorm());
  }
  return best;
}

}  // namespace detail

/// Smallest squared distance from u_nom to a feasible point on the grid lines of [lo, -lo]^2
/// at the given spacing, sweeping both axes.
inline double grid_projection(const Eigen::MatrixXd& G, const Eigen::VectorXd& h, const V2& u_nom,
                              double lo = -2.0, double step = 1e-3) {
  Eigen::MatrixXd swapped = G;
  swapped.col(0).swap(swapped.col(1));
  return std::min(detail::column_sweep(G, h, u_nom, lo, step),
                  detail::column_sweep(swapped, h, V2(u_nom.y(), u_nom.x()), lo, step));
}

/// Exact projection by trying every subset of rows as the active set (small problems only).
inline Eigen::VectorXd subset_projection(const Eigen::MatrixXd& G, const Eigen::VectorXd& h,
                                         const Eigen::VectorXd& u_nom, bool* feasible_out = nullptr) {
  const auto rows = static_cast<int>(G.rows());
  Eigen::VectorXd best;
  double best_dist = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < (1 << rows); ++mask) {
    std::vector<int> idx;
    for (int r = 0; r < rows; ++r) if (mask & (1 << r)) idx.push_back(r);
    if (static_cast<Eigen::Index>(idx.size()) > G.cols()) continue;
    Eigen::VectorXd u = u_nom;
    if (!idx.empty()) {
      Eigen::MatrixXd A(idx.size(), G.cols());
      Eigen::VectorXd b(idx.size());
      for (std::size_t c = 0; c < idx.size(); ++c) {
        A.row(c) = G.row(idx[c]);
        b(c) = h(idx[c]);
      }
      // Closest point on the affine set A u = b.
      Eigen::MatrixXd AAt = A * A.transpose();
      if (std::abs(AAt.determinant()) < 1e-14) continue;
      u = u_nom + A.transpose() * AAt.ldlt().solve(b - A * u_nom);
    }
    if (((G * u - h).array() < -1e-9).any()) continue;
    const double dist = (u - u_nom).squaredNorm();
    if (dist < best_dist) {
      best_dist = dist;
      best = u;
    }
  }
  if (feasible_out) *feasible_out = std::isfinite(best_dist);
  return best;
}

/// Smallest total herder-evader distance over all permutations.
inline double best_matching_cost(const std::vector<V2>& herders, const std::vector<V2>& evaders) {
  std::vector<std::size_t> perm(herders.size());
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double cost = 0.0;
    for (std::size_t k = 0; k < perm.size(); ++k) cost += (herders[k] - evaders[perm[k]]).norm();
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

}  // namespace oracle
