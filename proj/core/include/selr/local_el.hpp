#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "selr/dataset.hpp"
#include "selr/estimating_function.hpp"
#include "selr/kernel.hpp"

namespace selr {

/// Local linear parameter at u0: A(u0) and h * A'(u0).
struct LocalParameter {
  Eigen::VectorXd a;
  Eigen::VectorXd hb;

  static LocalParameter zero(Eigen::Index p);
  /// Stacked (a, hb), length 2p.
  Eigen::VectorXd stacked() const;
  static LocalParameter from_stacked(const Eigen::VectorXd& beta);
};

/// Normalized kernel weights of the window [u0 - h, u0 + h]. Only the
/// active observations are stored; `w[k]` belongs to row `active[k]`.
struct LocalWeights {
  double u0 = 0.0;
  double h = 0.0;
  std::vector<Eigen::Index> active;
  Eigen::VectorXd w;
  /// Fewer than 2p + 1 active points.
  bool thin = false;

  /// The full n-vector of weights (zeros outside the window).
  Eigen::VectorXd dense(Eigen::Index n) const;
  /// Sum of w log w over the active set.
  double entropy() const;
};

LocalWeights local_weights(const Dataset& data, const Kernel& kernel, double h, double u0);

/// Rows G(r_i) (x) Z(X_i, (U_i - u0)/h) over the active set, with the G
/// index varying slowest. Shape |active| x (2p k0).
Eigen::MatrixXd moment_vectors(const Dataset& data, const LocalWeights& weights,
                               const LocalParameter& beta, const EstimatingFunction& g);

enum class SolveStatus { Converged, Infeasible, MaxIter };

const char* to_string(SolveStatus status);

struct DualSolution {
  Eigen::VectorXd alpha;
  /// sum w log(1 + alpha^T G) at alpha; equals entropy - logel.
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  SolveStatus status = SolveStatus::Converged;
};

/// Maximizes the concave dual sum_i w_i log(1 + alpha^T G_i) by damped
/// Newton, keeping 1 + alpha^T G_i > 0. Never throws on infeasibility; the
/// status says what happened. Infeasibility is confirmed by a convex hull
/// linear program when the Newton path diverges or stalls.
DualSolution solve_lagrange(const Eigen::MatrixXd& moments, const Eigen::VectorXd& weights,
                            const Eigen::VectorXd* alpha_init = nullptr);

/// p_i = w_i / (1 + alpha^T G_i). Throws Infeasible if some denominator is
/// not positive.
Eigen::VectorXd implied_probabilities(const Eigen::MatrixXd& moments,
                                      const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& alpha);

struct LocalLogEL {
  double logel = 0.0;
  double entropy = 0.0;
  DualSolution dual;
};

/// Local log empirical likelihood l(beta, u0). Throws Infeasible when the
/// origin is not inside the hull of the moment vectors.
LocalLogEL local_logel(const Dataset& data, const Kernel& kernel, double h, double u0,
                       const LocalParameter& beta, const EstimatingFunction& g);
LocalLogEL local_logel(const Dataset& data, const LocalWeights& weights,
                       const LocalParameter& beta, const EstimatingFunction& g,
                       const Eigen::VectorXd* alpha_init = nullptr);

/// Kernel-weighted least squares of Y on Z(X, (U - u0)/h). Throws
/// SingularDesign if the weighted design is rank deficient.
LocalParameter lls_init(const Dataset& data, const Kernel& kernel, double h, double u0);
LocalParameter lls_init(const Dataset& data, const LocalWeights& weights);

struct LocalELFit {
  double u0 = 0.0;
  LocalParameter beta;
  Eigen::VectorXd alpha;
  double logel = 0.0;
  double entropy = 0.0;
  SolveStatus status = SolveStatus::Converged;
  int inner_iters = 0;
  int outer_iters = 0;
  double grad_norm = 0.0;
  /// Objective did not improve on the starting point.
  bool no_improvement = false;
};

struct FitOptions {
  int max_outer = 200;
  double grad_tol = 1e-7;
  double step_tol = 1e-9;
};

/// beta_hat(u0) = argmax_beta l(beta, u0), by quasi-Newton ascent from
/// `init` (default: lls_init). Hard indicator G is rejected with
/// DerivativeUnavailable since the profile is piecewise constant in beta.
LocalELFit fit_local(const Dataset& data, const Kernel& kernel, double h, double u0,
                     const EstimatingFunction& g,
                     const std::optional<LocalParameter>& init = std::nullopt,
                     const FitOptions& options = {});
LocalELFit fit_local(const Dataset& data, const LocalWeights& weights,
                     const EstimatingFunction& g,
                     const std::optional<LocalParameter>& init = std::nullopt,
                     const FitOptions& options = {});

/// Maximizes l over the free coordinates with A_k(u0) = fixed_value and
/// h A_k'(u0) = h * fixed_slope pinned for k in fixed_idx.
LocalELFit fit_local_constrained(const Dataset& data, const Kernel& kernel, double h,
                                 double u0, const EstimatingFunction& g,
                                 const Eigen::VectorXd& fixed_value,
                                 const Eigen::VectorXd& fixed_slope,
                                 const std::vector<int>& fixed_idx,
                                 const std::optional<LocalParameter>& init = std::nullopt,
                                 const FitOptions& options = {});
LocalELFit fit_local_constrained(const Dataset& data, const LocalWeights& weights,
                                 const EstimatingFunction& g,
                                 const Eigen::VectorXd& fixed_value,
                                 const Eigen::VectorXd& fixed_slope,
                                 const std::vector<int>& fixed_idx,
                                 const std::optional<LocalParameter>& init = std::nullopt,
                                 const FitOptions& options = {});

}  // namespace selr
