#include <cmath>

#include <Eigen/Dense>

#include "selr/error.hpp"
#include "selr/selr.hpp"

namespace selr {
namespace {

Eigen::VectorXd model(const Dataset& data, const ParametricFamily& family,
                      const Eigen::VectorXd& theta) {
  Eigen::VectorXd out(data.n());
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const Eigen::VectorXd a = family.eval(data.u[i], theta);
    if (a.size() != data.p()) {
      throw Error(ErrorCode::InvalidArgument, "parametric family returned the wrong dimension");
    }
    out[i] = data.x.row(i).dot(a);
  }
  return out;
}

Eigen::MatrixXd jacobian(const Dataset& data, const ParametricFamily& family,
                         const Eigen::VectorXd& theta) {
  const Eigen::Index q = theta.size();
  Eigen::MatrixXd jac(data.n(), q);
  for (Eigen::Index k = 0; k < q; ++k) {
    const double step = 1e-6 * std::max(1.0, std::abs(theta[k]));
    Eigen::VectorXd up = theta, down = theta;
    up[k] += step;
    down[k] -= step;
    jac.col(k) = (model(data, family, up) - model(data, family, down)) / (2.0 * step);
  }
  return jac;
}

}  // namespace

BiasCorrection bias_correct(const Dataset& data, const ParametricFamily& family,
                            const Eigen::VectorXd& theta_init) {
  data.validate();
  if (!family.eval || family.theta_dim < 1 || theta_init.size() != family.theta_dim) {
    throw Error(ErrorCode::InvalidArgument, "parametric family and theta_init do not match");
  }
  constexpr int kMaxIter = 200;
  Eigen::VectorXd theta = theta_init;
  Eigen::VectorXd resid = data.y - model(data, family, theta);
  double rss = resid.squaredNorm();
  const double y_scale = std::max(1.0, data.y.squaredNorm());
  double lambda = 1e-3;
  int iter = 0;
  bool converged = rss <= 1e-30 * y_scale;
  while (!converged && iter < kMaxIter) {
    ++iter;
    const Eigen::MatrixXd jac = jacobian(data, family, theta);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const Eigen::VectorXd jtr = jac.transpose() * resid;
    if (jtr.norm() <= 1e-12 * std::sqrt(y_scale) * std::max(1.0, jac.norm())) {
      converged = true;
      break;
    }
    bool improved = false;
    while (lambda < 1e12) {
      Eigen::MatrixXd lhs = jtj;
      lhs.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const Eigen::VectorXd delta = lhs.ldlt().solve(jtr);
      const Eigen::VectorXd trial = theta + delta;
      const Eigen::VectorXd trial_resid = data.y - model(data, family, trial);
      const double trial_rss = trial_resid.squaredNorm();
      if (std::isfinite(trial_rss) && trial_rss <= rss) {
        const double gain = rss - trial_rss;
        const double step = delta.norm();
        theta = trial;
        resid = trial_resid;
        rss = trial_rss;
        lambda = std::max(lambda / 10.0, 1e-12);
        improved = true;
        if (gain <= 1e-15 * std::max(rss, 1e-300) ||
            step <= 1e-12 * std::max(1.0, theta.norm()) || rss <= 1e-30 * y_scale) {
          converged = true;
        }
        break;
      }
      lambda *= 10.0;
    }
    if (!improved) {
      converged = jtr.norm() <= 1e-6 * std::sqrt(y_scale) * std::max(1.0, jac.norm());
      break;
    }
  }
  if (!converged) {
    throw Error(ErrorCode::NlsNonConvergence,
                "nonlinear least squares did not converge in " + std::to_string(iter) +
                    " iterations");
  }
  BiasCorrection out;
  out.theta_hat = theta;
  out.iterations = iter;
  out.transformed = data;
  out.transformed.y = resid;
  return out;
}

}  // namespace selr
