#include "selr/local_el.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/QR>

#include "selr/error.hpp"
#include "selr/hull.hpp"

namespace selr {
namespace {

constexpr int kMaxNewton = 100;
constexpr double kMinStep = 1e-14;
constexpr double kDivergence = 1e12;

double max_row_norm(const Eigen::MatrixXd& m) {
  return m.rows() == 0 ? 0.0 : m.rowwise().norm().maxCoeff();
}

// Rounding error of the dual gradient when some z_i are tiny.
double gradient_noise(const Eigen::MatrixXd& m, const Eigen::VectorXd& w,
                      const Eigen::VectorXd& alpha, const Eigen::VectorXd& z) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double noise = 0.0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    const double zi = z[i];
    if (!(zi > 0.0)) continue;
    const double dz = eps * (1.0 + m.row(i).cwiseAbs().dot(alpha.cwiseAbs()));
    noise += w[i] * m.row(i).norm() * dz / (zi * zi);
  }
  return noise;
}

// Sum of w log z, or -inf when some z is not positive.
double dual_value(const Eigen::VectorXd& z, const Eigen::VectorXd& w) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    if (!(z[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    s += w[i] * std::log(z[i]);
  }
  return s;
}

// Windowed regressors Z_i = (X_i, t_i X_i) and responses.
struct Window {
  Eigen::MatrixXd z;  // |active| x 2p
  Eigen::VectorXd y;
  Eigen::VectorXd w;
};

Window make_window(const Dataset& data, const LocalWeights& weights) {
  const Eigen::Index m = static_cast<Eigen::Index>(weights.active.size());
  const Eigen::Index p = data.p();
  Window win;
  win.z.resize(m, 2 * p);
  win.y.resize(m);
  win.w = weights.w;
  for (Eigen::Index k = 0; k < m; ++k) {
    const Eigen::Index i = weights.active[static_cast<std::size_t>(k)];
    const double t = (data.u[i] - weights.u0) / weights.h;
    for (Eigen::Index j = 0; j < p; ++j) {
      win.z(k, j) = data.x(i, j);
      win.z(k, p + j) = t * data.x(i, j);
    }
    win.y[k] = data.y[i];
  }
  return win;
}

Eigen::MatrixXd window_moments(const Window& win, const Eigen::VectorXd& beta,
                               const EstimatingFunction& g) {
  const Eigen::Index m = win.z.rows();
  const Eigen::Index q = win.z.cols();
  const int k0 = g.k0();
  Eigen::MatrixXd out(m, q * k0);
  Eigen::VectorXd gv(k0);
  const Eigen::VectorXd resid = win.y - win.z * beta;
  for (Eigen::Index i = 0; i < m; ++i) {
    g.eval(resid[i], std::span<double>(gv.data(), gv.size()));
    for (int k = 0; k < k0; ++k) {
      out.block(i, k * q, 1, q) = gv[k] * win.z.row(i);
    }
  }
  return out;
}

}  // namespace

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::MaxIter: return "max_iter";
  }
  return "unknown";
}

LocalParameter LocalParameter::zero(Eigen::Index p) {
  return {Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(p)};
}

Eigen::VectorXd LocalParameter::stacked() const {
  Eigen::VectorXd beta(a.size() + hb.size());
  beta << a, hb;
  return beta;
}

LocalParameter LocalParameter::from_stacked(const Eigen::VectorXd& beta) {
  const Eigen::Index p = beta.size() / 2;
  return {beta.head(p), beta.tail(p)};
}

Eigen::VectorXd LocalWeights::dense(Eigen::Index n) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < active.size(); ++k) {
    out[active[k]] = w[static_cast<Eigen::Index>(k)];
  }
  return out;
}

double LocalWeights::entropy() const {
  double s = 0.0;
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    if (w[k] > 0.0) s += w[k] * std::log(w[k]);
  }
  return s;
}

LocalWeights local_weights(const Dataset& data, const Kernel& kernel, double h, double u0) {
  if (!(h > 0.0)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  LocalWeights lw;
  lw.u0 = u0;
  lw.h = h;
  std::vector<double> kv;
  const Eigen::Index n = data.n();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double k = kernel((data.u[i] - u0) / h);
    if (k > 0.0) {
      lw.active.push_back(i);
      kv.push_back(k);
    }
  }
  if (lw.active.empty()) {
    throw Error(ErrorCode::EmptyWindow,
                "no observation within bandwidth of u0 = " + std::to_string(u0));
  }
  double total = 0.0;
  for (double k : kv) total += k;
  lw.w.resize(static_cast<Eigen::Index>(kv.size()));
  for (std::size_t k = 0; k < kv.size(); ++k) lw.w[static_cast<Eigen::Index>(k)] = kv[k] / total;
  lw.thin = static_cast<Eigen::Index>(lw.active.size()) < 2 * data.p() + 1;
  return lw;
}

Eigen::MatrixXd moment_vectors(const Dataset& data, const LocalWeights& weights,
                               const LocalParameter& beta, const EstimatingFunction& g) {
  return window_moments(make_window(data, weights), beta.stacked(), g);
}

DualSolution solve_lagrange(const Eigen::MatrixXd& moments, const Eigen::VectorXd& weights,
                            const Eigen::VectorXd* alpha_init) {
  const Eigen::Index d = moments.cols();
  DualSolution sol;
  sol.alpha = Eigen::VectorXd::Zero(d);
  if (moments.rows() != weights.size()) {
    throw Error(ErrorCode::InvalidArgument, "moments and weights are not aligned");
  }
  const double scale = max_row_norm(moments);
  if (scale == 0.0) return sol;

  const double grad_tol = 1e-12 * std::max(1.0, scale);
  if (alpha_init != nullptr && alpha_init->size() == d) {
    const Eigen::VectorXd z0 = Eigen::VectorXd::Ones(moments.rows()) + moments * *alpha_init;
    if (z0.minCoeff() > 0.0) sol.alpha = *alpha_init;
  }

  Eigen::VectorXd z = Eigen::VectorXd::Ones(moments.rows()) + moments * sol.alpha;
  double f = dual_value(z, weights);
  Eigen::VectorXd grad = moments.transpose() * weights.cwiseQuotient(z);
  bool trouble = false;
  bool diverged = false;
  // Along an unbounded ray the gradient also vanishes, but sum p_i = 1 - alpha^T grad
  // stays away from one.
  const auto stationary = [&] {
    return grad.norm() <= grad_tol && std::abs(sol.alpha.dot(grad)) <= 1e-9;
  };

  for (; sol.iterations < kMaxNewton; ++sol.iterations) {
    if (stationary()) break;
    const Eigen::VectorXd hw = weights.cwiseQuotient(z.cwiseAbs2());
    const Eigen::MatrixXd hess = moments.transpose() * hw.asDiagonal() * moments;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
    Eigen::VectorXd step;
    if (ldlt.info() == Eigen::Success && ldlt.isPositive() &&
        ldlt.vectorD().minCoeff() > 1e-14 * ldlt.vectorD().maxCoeff()) {
      step = ldlt.solve(grad);
    } else {
      step = hess.completeOrthogonalDecomposition().solve(grad);
    }

    double s = 1.0;
    Eigen::VectorXd alpha_new, z_new, grad_new;
    double f_new = 0.0;
    bool accepted = false;
    while (s >= kMinStep) {
      alpha_new = sol.alpha + s * step;
      z_new = Eigen::VectorXd::Ones(moments.rows()) + moments * alpha_new;
      f_new = dual_value(z_new, weights);
      if (std::isfinite(f_new)) {
        grad_new = moments.transpose() * weights.cwiseQuotient(z_new);
        if (f_new >= f || grad_new.norm() < grad.norm()) {
          accepted = true;
          break;
        }
      }
      s *= 0.5;
    }
    if (!accepted) {
      trouble = true;
      break;
    }
    const bool stalled = (alpha_new - sol.alpha).norm() <= 1e-15 * (1.0 + sol.alpha.norm());
    sol.alpha = alpha_new;
    z = z_new;
    f = f_new;
    grad = grad_new;
    if (sol.alpha.norm() * scale > kDivergence) {
      trouble = true;
      diverged = true;
      break;
    }
    if (stalled) {
      trouble = true;
      break;
    }
  }

  sol.value = f;
  sol.grad_norm = grad.norm();
  if (!trouble && stationary()) {
    sol.status = SolveStatus::Converged;
    return sol;
  }
  const double floor = std::max(1e-8 * std::max(1.0, scale), 64.0 * gradient_noise(moments, weights, sol.alpha, z));
  if (trouble && !diverged && sol.grad_norm <= floor &&
      std::abs(sol.alpha.dot(grad)) <= std::max(1e-6, sol.alpha.norm() * floor)) {
    // Rounding floor reached close to the optimum.
    sol.status = SolveStatus::Converged;
    return sol;
  }
  if (diverged || !zero_in_convex_hull(moments)) {
    sol.status = SolveStatus::Infeasible;
  } else {
    sol.status = SolveStatus::MaxIter;
  }
  return sol;
}

Eigen::VectorXd implied_probabilities(const Eigen::MatrixXd& moments,
                                      const Eigen::VectorXd& weights,
                                      const Eigen::VectorXd& alpha) {
  const Eigen::VectorXd z = Eigen::VectorXd::Ones(moments.rows()) + moments * alpha;
  if (z.size() > 0 && !(z.minCoeff() > 0.0)) {
    throw Error(ErrorCode::Infeasible, "Lagrange multiplier is not dual feasible");
  }
  return weights.cwiseQuotient(z);
}

LocalLogEL local_logel(const Dataset& data, const LocalWeights& weights,
                       const LocalParameter& beta, const EstimatingFunction& g,
                       const Eigen::VectorXd* alpha_init) {
  const Eigen::MatrixXd m = moment_vectors(data, weights, beta, g);
  LocalLogEL out;
  out.entropy = weights.entropy();
  out.dual = solve_lagrange(m, weights.w, alpha_init);
  if (out.dual.status == SolveStatus::Infeasible) {
    throw Error(ErrorCode::Infeasible,
                "origin is not inside the moment hull at u0 = " + std::to_string(weights.u0));
  }
  if (out.dual.status == SolveStatus::MaxIter) {
    throw Error(ErrorCode::MaxIter,
                "Lagrange solve did not converge at u0 = " + std::to_string(weights.u0));
  }
  out.logel = out.entropy - out.dual.value;
  return out;
}

LocalLogEL local_logel(const Dataset& data, const Kernel& kernel, double h, double u0,
                       const LocalParameter& beta, const EstimatingFunction& g) {
  return local_logel(data, local_weights(data, kernel, h, u0), beta, g);
}

LocalParameter lls_init(const Dataset& data, const LocalWeights& weights) {
  const Window win = make_window(data, weights);
  const Eigen::VectorXd sw = win.w.cwiseSqrt();
  const Eigen::MatrixXd design = sw.asDiagonal() * win.z;
  const Eigen::VectorXd rhs = sw.cwiseProduct(win.y);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  qr.setThreshold(1e-10);
  if (qr.rank() < design.cols()) {
    throw Error(ErrorCode::SingularDesign,
                "local design is rank deficient at u0 = " + std::to_string(weights.u0));
  }
  return LocalParameter::from_stacked(qr.solve(rhs));
}

LocalParameter lls_init(const Dataset& data, const Kernel& kernel, double h, double u0) {
  return lls_init(data, local_weights(data, kernel, h, u0));
}

namespace {

// Profile of the dual value F(beta) = max_alpha sum w log(1 + alpha^T G(beta))
// over the free coordinates of beta. Minimizing F maximizes l(beta, u0).
class Profile {
 public:
  Profile(const Dataset& data, const LocalWeights& weights, const EstimatingFunction& g,
          Eigen::VectorXd base, std::vector<Eigen::Index> free)
      : win_(make_window(data, weights)),
        g_(g),
        base_(std::move(base)),
        free_(std::move(free)) {}

  struct Point {
    Eigen::VectorXd x;
    Eigen::VectorXd beta;
    DualSolution dual;
    Eigen::MatrixXd moments;
  };

  Eigen::VectorXd expand(const Eigen::VectorXd& x) const {
    Eigen::VectorXd beta = base_;
    for (std::size_t k = 0; k < free_.size(); ++k) beta[free_[k]] = x[static_cast<Eigen::Index>(k)];
    return beta;
  }

  Eigen::VectorXd restrict(const Eigen::VectorXd& beta) const {
    Eigen::VectorXd x(static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) x[static_cast<Eigen::Index>(k)] = beta[free_[k]];
    return x;
  }

  Point eval(const Eigen::VectorXd& x, const Eigen::VectorXd* alpha_warm) {
    Point pt;
    pt.x = x;
    pt.beta = expand(x);
    pt.moments = window_moments(win_, pt.beta, g_);
    pt.dual = solve_lagrange(pt.moments, win_.w, alpha_warm);
    inner_iters_ += pt.dual.iterations;
    return pt;
  }

  bool usable(const Point& pt) const {
    return pt.dual.status == SolveStatus::Converged && std::isfinite(pt.dual.value);
  }

  Eigen::VectorXd gradient(const Point& pt) {
    if (!g_.has_derivative()) return numeric_gradient(pt);
    const Eigen::Index q = win_.z.cols();
    const int k0 = g_.k0();
    const Eigen::VectorXd resid = win_.y - win_.z * pt.beta;
    const Eigen::VectorXd z = Eigen::VectorXd::Ones(win_.z.rows()) + pt.moments * pt.dual.alpha;
    Eigen::VectorXd gd(k0);
    Eigen::VectorXd full = Eigen::VectorXd::Zero(q);
    for (Eigen::Index i = 0; i < win_.z.rows(); ++i) {
      g_.eval_derivative(resid[i], std::span<double>(gd.data(), gd.size()));
      double a = 0.0;
      for (int k = 0; k < k0; ++k) {
        if (gd[k] != 0.0) a += gd[k] * pt.dual.alpha.segment(k * q, q).dot(win_.z.row(i));
      }
      full -= (win_.w[i] * a / z[i]) * win_.z.row(i).transpose();
    }
    return restrict(full);
  }

  // Gauss-Newton curvature J^T S^{-1} J of the quadratic approximation
  // F ~ m^T S^{-1} m / 2; used to seed the quasi-Newton metric.
  std::optional<Eigen::MatrixXd> curvature(const Point& pt) const {
    if (!g_.has_derivative()) return std::nullopt;
    const Eigen::Index q = win_.z.cols();
    const int k0 = g_.k0();
    const Eigen::VectorXd resid = win_.y - win_.z * pt.beta;
    Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(q * k0, q);
    Eigen::VectorXd gd(k0);
    for (Eigen::Index i = 0; i < win_.z.rows(); ++i) {
      g_.eval_derivative(resid[i], std::span<double>(gd.data(), gd.size()));
      for (int k = 0; k < k0; ++k) {
        if (gd[k] == 0.0) continue;
        jac.block(k * q, 0, q, q) -=
            (win_.w[i] * gd[k]) * win_.z.row(i).transpose() * win_.z.row(i);
      }
    }
    const Eigen::MatrixXd s = pt.moments.transpose() * win_.w.asDiagonal() * pt.moments;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(s);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return std::nullopt;
    Eigen::MatrixXd jf(q * k0, static_cast<Eigen::Index>(free_.size()));
    for (std::size_t k = 0; k < free_.size(); ++k) jf.col(static_cast<Eigen::Index>(k)) = jac.col(free_[k]);
    Eigen::MatrixXd h = jf.transpose() * ldlt.solve(jf);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() <= 1e-12 * es.eigenvalues().maxCoeff()) {
      return std::nullopt;
    }
    return h;
  }

  int inner_iters() const noexcept { return inner_iters_; }

 private:
  Eigen::VectorXd numeric_gradient(const Point& pt) {
    Eigen::VectorXd grad(pt.x.size());
    for (Eigen::Index k = 0; k < pt.x.size(); ++k) {
      const double step = 1e-6 * std::max(1.0, std::abs(pt.x[k]));
      Eigen::VectorXd xp = pt.x, xm = pt.x;
      xp[k] += step;
      xm[k] -= step;
      const Point fp = eval(xp, &pt.dual.alpha);
      const Point fm = eval(xm, &pt.dual.alpha);
      if (!usable(fp) || !usable(fm)) {
        grad[k] = 0.0;
        continue;
      }
      grad[k] = (fp.dual.value - fm.dual.value) / (2.0 * step);
    }
    return grad;
  }

  Window win_;
  const EstimatingFunction& g_;
  Eigen::VectorXd base_;
  std::vector<Eigen::Index> free_;
  int inner_iters_ = 0;
};

LocalELFit optimize_profile(const Dataset& data, const LocalWeights& weights,
                            const EstimatingFunction& g, const Eigen::VectorXd& start,
                            std::vector<Eigen::Index> free, const FitOptions& options) {
  Profile profile(data, weights, g, start, std::move(free));
  LocalELFit fit;
  fit.u0 = weights.u0;
  fit.entropy = weights.entropy();

  Profile::Point cur = profile.eval(profile.restrict(start), nullptr);
  auto finish = [&](const Profile::Point& pt, SolveStatus status) {
    fit.beta = LocalParameter::from_stacked(pt.beta);
    fit.alpha = pt.dual.alpha;
    fit.logel = fit.entropy - pt.dual.value;
    fit.status = status;
    fit.inner_iters = profile.inner_iters();
    return fit;
  };
  if (!profile.usable(cur)) {
    fit.no_improvement = true;
    return finish(cur, cur.dual.status);
  }
  const double start_value = cur.dual.value;
  const Eigen::Index m = cur.x.size();
  if (m == 0) return finish(cur, SolveStatus::Converged);

  Eigen::VectorXd grad = profile.gradient(cur);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(m, m);
  if (auto h = profile.curvature(cur)) {
    hinv = h->inverse();
  } else if (grad.norm() > 0.0) {
    hinv /= std::max(1.0, grad.norm());
  }

  SolveStatus status = SolveStatus::MaxIter;
  for (fit.outer_iters = 0; fit.outer_iters < options.max_outer; ++fit.outer_iters) {
    fit.grad_norm = grad.norm();
    if (fit.grad_norm <= options.grad_tol || cur.dual.value == 0.0) {
      status = SolveStatus::Converged;
      break;
    }
    Eigen::VectorXd dir = -hinv * grad;
    if (dir.dot(grad) >= 0.0) {
      hinv = Eigen::MatrixXd::Identity(m, m) / std::max(1.0, grad.norm());
      dir = -hinv * grad;
    }
    double s = 1.0;
    bool accepted = false;
    Profile::Point next;
    while (s * dir.norm() > options.step_tol) {
      next = profile.eval(cur.x + s * dir, &cur.dual.alpha);
      if (profile.usable(next) &&
          next.dual.value <= cur.dual.value + 1e-4 * s * grad.dot(dir)) {
        accepted = true;
        break;
      }
      s *= 0.5;
    }
    if (!accepted) {
      // No descent along the quasi-Newton direction above the step floor.
      status = SolveStatus::Converged;
      break;
    }
    const Eigen::VectorXd grad_next = profile.gradient(next);
    const Eigen::VectorXd sk = next.x - cur.x;
    const Eigen::VectorXd yk = grad_next - grad;
    const double sy = sk.dot(yk);
    if (sy > 1e-14 * sk.norm() * yk.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
      hinv = (id - rho * sk * yk.transpose()) * hinv * (id - rho * yk * sk.transpose()) +
             rho * sk * sk.transpose();
    }
    const double moved = sk.norm();
    cur = std::move(next);
    grad = grad_next;
    if (moved <= options.step_tol) {
      fit.grad_norm = grad.norm();
      status = SolveStatus::Converged;
      break;
    }
  }
  fit.no_improvement = !(cur.dual.value < start_value);
  return finish(cur, status);
}

void require_smooth(const EstimatingFunction& g) {
  if (g.kind() == EstimatingKind::SymmetricIndicator) {
    throw Error(ErrorCode::DerivativeUnavailable,
                "estimating beta needs identity, smoothed or custom G; the hard "
                "indicator profile is piecewise constant");
  }
}

Eigen::VectorXd starting_point(const Dataset& data, const LocalWeights& weights,
                               const std::optional<LocalParameter>& init) {
  if (init) return init->stacked();
  try {
    return lls_init(data, weights).stacked();
  } catch (const Error& e) {
    if (e.code() != ErrorCode::SingularDesign) throw;
    return LocalParameter::zero(data.p()).stacked();
  }
}

}  // namespace

LocalELFit fit_local(const Dataset& data, const LocalWeights& weights,
                     const EstimatingFunction& g, const std::optional<LocalParameter>& init,
                     const FitOptions& options) {
  require_smooth(g);
  const Eigen::VectorXd start = starting_point(data, weights, init);
  std::vector<Eigen::Index> free(static_cast<std::size_t>(start.size()));
  for (Eigen::Index k = 0; k < start.size(); ++k) free[static_cast<std::size_t>(k)] = k;
  return optimize_profile(data, weights, g, start, std::move(free), options);
}

LocalELFit fit_local(const Dataset& data, const Kernel& kernel, double h, double u0,
                     const EstimatingFunction& g, const std::optional<LocalParameter>& init,
                     const FitOptions& options) {
  return fit_local(data, local_weights(data, kernel, h, u0), g, init, options);
}

LocalELFit fit_local_constrained(const Dataset& data, const LocalWeights& weights,
                                 const EstimatingFunction& g,
                                 const Eigen::VectorXd& fixed_value,
                                 const Eigen::VectorXd& fixed_slope,
                                 const std::vector<int>& fixed_idx,
                                 const std::optional<LocalParameter>& init,
                                 const FitOptions& options) {
  require_smooth(g);
  const Eigen::Index p = data.p();
  const auto p1 = static_cast<Eigen::Index>(fixed_idx.size());
  if (p1 < 1 || p1 >= p) {
    throw Error(ErrorCode::InvalidArgument,
                "constrained fit needs 1 <= number of fixed coefficients < p");
  }
  if (fixed_value.size() != p1 || fixed_slope.size() != p1) {
    throw Error(ErrorCode::InvalidArgument, "fixed values must match the fixed index set");
  }
  std::vector<bool> pinned(static_cast<std::size_t>(p), false);
  for (int k : fixed_idx) {
    if (k < 0 || k >= p || pinned[static_cast<std::size_t>(k)]) {
      throw Error(ErrorCode::InvalidArgument, "invalid or repeated fixed coefficient index");
    }
    pinned[static_cast<std::size_t>(k)] = true;
  }
  Eigen::VectorXd start = starting_point(data, weights, init);
  for (Eigen::Index j = 0; j < p1; ++j) {
    const int k = fixed_idx[static_cast<std::size_t>(j)];
    start[k] = fixed_value[j];
    start[p + k] = weights.h * fixed_slope[j];
  }
  std::vector<Eigen::Index> free;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!pinned[static_cast<std::size_t>(k)]) {
      free.push_back(k);
    }
  }
  for (Eigen::Index k = 0; k < p; ++k) {
    if (!pinned[static_cast<std::size_t>(k)]) free.push_back(p + k);
  }
  return optimize_profile(data, weights, g, start, std::move(free), options);
}

LocalELFit fit_local_constrained(const Dataset& data, const Kernel& kernel, double h,
                                 double u0, const EstimatingFunction& g,
                                 const Eigen::VectorXd& fixed_value,
                                 const Eigen::VectorXd& fixed_slope,
                                 const std::vector<int>& fixed_idx,
                                 const std::optional<LocalParameter>& init,
                                 const FitOptions& options) {
  return fit_local_constrained(data, local_weights(data, kernel, h, u0), g, fixed_value,
                               fixed_slope, fixed_idx, init, options);
}

}  // namespace selr
