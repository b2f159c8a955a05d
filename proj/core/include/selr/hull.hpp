#pragma once

#include <Eigen/Core>

namespace selr {

/// True if the origin lies in the closed convex hull of the rows of `points`.
/// Solved as the phase-one linear program
///   find lambda >= 0 with sum(lambda) = 1 and points^T lambda = 0
/// by a dense simplex with Bland's rule. Rows are rescaled to unit length
/// first, which preserves the answer.
bool zero_in_convex_hull(const Eigen::MatrixXd& points, double tol = 1e-9);

}  // namespace selr
