#include "selr/hull.hpp"

#include <cmath>
#include <vector>

namespace selr {

bool zero_in_convex_hull(const Eigen::MatrixXd& points, double tol) {
  const Eigen::Index count = points.rows();
  const Eigen::Index dim = points.cols();
  if (count == 0) return false;

  Eigen::MatrixXd p = points;
  for (Eigen::Index i = 0; i < count; ++i) {
    const double norm = p.row(i).norm();
    if (norm == 0.0) return true;
    p.row(i) /= norm;
  }

  // Tableau rows: dim equality rows (p^T lambda = 0) and the simplex row.
  const Eigen::Index rows = dim + 1;
  const Eigen::Index cols = count + rows + 1;  // lambda, artificials, rhs
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(rows + 1, cols);
  t.block(0, 0, dim, count) = p.transpose();
  t.block(dim, 0, 1, count).setOnes();
  t(dim, cols - 1) = 1.0;
  for (Eigen::Index r = 0; r < rows; ++r) t(r, count + r) = 1.0;
  // Objective row: minimize the artificial sum, stored as reduced costs.
  for (Eigen::Index c = 0; c < cols; ++c) {
    double s = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) s += t(r, c);
    t(rows, c) = (c >= count && c < count + rows) ? 0.0 : -s;
  }
  std::vector<Eigen::Index> basis(rows);
  for (Eigen::Index r = 0; r < rows; ++r) basis[r] = count + r;

  const Eigen::Index max_pivots = 50 * (count + rows);
  for (Eigen::Index it = 0; it < max_pivots; ++it) {
    // Bland: smallest index with negative reduced cost.
    Eigen::Index enter = -1;
    for (Eigen::Index c = 0; c < count + rows; ++c) {
      if (t(rows, c) < -1e-12) {
        enter = c;
        break;
      }
    }
    if (enter < 0) break;
    Eigen::Index leave = -1;
    double best = 0.0;
    for (Eigen::Index r = 0; r < rows; ++r) {
      if (t(r, enter) > 1e-12) {
        const double ratio = t(r, cols - 1) / t(r, enter);
        if (leave < 0 || ratio < best - 1e-15 ||
            (std::abs(ratio - best) <= 1e-15 && basis[r] < basis[leave])) {
          leave = r;
          best = ratio;
        }
      }
    }
    if (leave < 0) break;  // unbounded cannot happen in phase one
    t.row(leave) /= t(leave, enter);
    for (Eigen::Index r = 0; r <= rows; ++r) {
      if (r != leave && t(r, enter) != 0.0) t.row(r) -= t(r, enter) * t.row(leave);
    }
    basis[leave] = enter;
  }
  // Phase-one optimum equals -t(rows, rhs).
  return -t(rows, cols - 1) <= tol;
}

}  // namespace selr
