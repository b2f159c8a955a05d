#pragma once

#include <Eigen/Core>

namespace selr {

/// Observations (U_i, X_i, Y_i) of a varying-coefficient model
/// Y = A(U)^T X + eps. An intercept-only model uses a single column of ones.
struct Dataset {
  Eigen::VectorXd u;
  Eigen::MatrixXd x;  // n x p
  Eigen::VectorXd y;

  Eigen::Index n() const noexcept { return u.size(); }
  Eigen::Index p() const noexcept { return x.cols(); }

  /// Throws InvalidArgument unless lengths agree, n >= 1, p >= 1, and all
  /// entries are finite.
  void validate() const;

  /// Intercept-only dataset (p = 1, X = 1).
  static Dataset intercept_only(Eigen::VectorXd u, Eigen::VectorXd y);
};

}  // namespace selr
