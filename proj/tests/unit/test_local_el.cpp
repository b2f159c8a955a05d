#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "selr/error.hpp"
#include "selr/hull.hpp"
#include "selr/local_el.hpp"
#include "test_data.hpp"

namespace {

using selr::Dataset;
using selr::Kernel;
using selr::KernelFamily;
using selr::LocalParameter;
using selr::SolveStatus;

// Root of sum w g / (1 + a g) on the feasible interval, by bisection.
double bisection_alpha(const Eigen::VectorXd& g, const Eigen::VectorXd& w) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (g[i] > 0) lo = std::max(lo, -1.0 / g[i]);
    if (g[i] < 0) hi = std::min(hi, -1.0 / g[i]);
  }
  auto score = [&](double a) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < g.size(); ++i) s += w[i] * g[i] / (1.0 + a * g[i]);
    return s;
  };
  // score is decreasing in a.
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (score(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double stationarity(const Eigen::MatrixXd& m, const Eigen::VectorXd& w, const Eigen::VectorXd& a) {
  Eigen::VectorXd s = Eigen::VectorXd::Zero(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    s += w[i] * m.row(i).transpose() / (1.0 + m.row(i).dot(a));
  }
  return s.norm();
}

TEST(SolveLagrange, ScalarExample) {
  Eigen::MatrixXd m(3, 1);
  m << 1.0, 2.0, -1.0;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(3, 1.0 / 3.0);
  const auto sol = selr::solve_lagrange(m, w);
  ASSERT_EQ(sol.status, SolveStatus::Converged);
  EXPECT_NEAR(sol.alpha[0], 0.4342585459106648, 1e-10);
  EXPECT_NEAR(sol.value, 0.13872501338281074, 1e-12);
  const Eigen::VectorXd p = selr::implied_probabilities(m, w, sol.alpha);
  EXPECT_NEAR(p.sum(), 1.0, 1e-12);
  EXPECT_NEAR(p[0], (1.0 / 3.0) / (1.0 + sol.alpha[0]), 1e-14);
}

TEST(SolveLagrange, MatchesBisectionOnRandomScalarWindows) {
  std::mt19937_64 gen(42);
  std::normal_distribution<double> norm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.1, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 8 + rep % 30;
    Eigen::MatrixXd m(n, 1);
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) {
      m(i, 0) = norm(gen) + 0.3;
      w[i] = unif(gen);
    }
    m(0, 0) = -std::abs(m(0, 0)) - 0.1;  // keep the origin inside the hull
    m(1, 0) = std::abs(m(1, 0)) + 0.1;
    w /= w.sum();
    const auto sol = selr::solve_lagrange(m, w);
    ASSERT_EQ(sol.status, SolveStatus::Converged) << rep;
    EXPECT_NEAR(sol.alpha[0], bisection_alpha(m.col(0), w), 1e-10) << rep;
  }
}

TEST(SolveLagrange, RandomMultivariateWindowsAreStationary) {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const int n = 30, d = 2 + rep % 4;
    Eigen::MatrixXd m(n, d);
    for (int i = 0; i < n; ++i) {
      for (int k = 0; k < d; ++k) m(i, k) = norm(gen) + 0.2;
    }
    const Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
    const auto sol = selr::solve_lagrange(m, w);
    if (sol.status == SolveStatus::Infeasible) {
      EXPECT_FALSE(selr::zero_in_convex_hull(m));
      continue;
    }
    ASSERT_EQ(sol.status, SolveStatus::Converged);
    EXPECT_LE(stationarity(m, w, sol.alpha), 1e-8);
    const Eigen::VectorXd denom = Eigen::VectorXd::Ones(n) + m * sol.alpha;
    EXPECT_GT(denom.minCoeff(), 0.0);
    const Eigen::VectorXd p = selr::implied_probabilities(m, w, sol.alpha);
    EXPECT_GT(p.minCoeff(), 0.0);
    EXPECT_NEAR(p.sum(), 1.0, 1e-10);
    EXPECT_LE((m.transpose() * p).norm(), 1e-8);
    EXPECT_GE(sol.value, -1e-14);
  }
}

TEST(SolveLagrange, InfeasibleWhenOriginOutsideHull) {
  Eigen::MatrixXd m(4, 2);
  m << 1.0, 0.5, 2.0, -1.0, 0.5, 0.1, 3.0, 2.0;
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(4, 0.25);
  const auto sol = selr::solve_lagrange(m, w);
  EXPECT_EQ(sol.status, SolveStatus::Infeasible);
}

TEST(SolveLagrange, TinyWeightOnHullBoundaryConverges) {
  // Only a point of negligible kernel weight balances the others.
  const int n = 10;
  Eigen::MatrixXd m(n, 2);
  Eigen::VectorXd w(n);
  for (int i = 0; i < n - 1; ++i) {
    m(i, 0) = 1.0 + 0.1 * i;
    m(i, 1) = std::sin(1.3 * i);
    w[i] = 1.0;
  }
  m(n - 1, 0) = -1.0;
  m(n - 1, 1) = 0.2;
  w[n - 1] = 1e-9;
  w /= w.sum();

  double value = 0.0;
  for (int rev = 0; rev < 2; ++rev) {
    const Eigen::MatrixXd mm = rev ? Eigen::MatrixXd(m.colwise().reverse()) : m;
    const Eigen::VectorXd ww = rev ? Eigen::VectorXd(w.reverse()) : w;
    const auto sol = selr::solve_lagrange(mm, ww);
    ASSERT_EQ(sol.status, SolveStatus::Converged);
    const Eigen::VectorXd p = selr::implied_probabilities(mm, ww, sol.alpha);
    EXPECT_NEAR(p.sum(), 1.0, 1e-6);
    if (rev) EXPECT_NEAR(sol.value, value, 1e-9 * value);
    value = sol.value;
  }
}

TEST(SolveLagrange, ZeroMomentsGiveZeroMultiplier) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Zero(5, 3);
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(5, 0.2);
  const auto sol = selr::solve_lagrange(m, w);
  EXPECT_EQ(sol.status, SolveStatus::Converged);
  EXPECT_EQ(sol.alpha.norm(), 0.0);
  EXPECT_EQ(sol.value, 0.0);
}

TEST(Hull, BasicCases) {
  Eigen::MatrixXd inside(3, 2);
  inside << 1, 0, -1, 1, -1, -1;
  EXPECT_TRUE(selr::zero_in_convex_hull(inside));
  Eigen::MatrixXd outside(3, 2);
  outside << 1, 0, 1, 1, 2, -1;
  EXPECT_FALSE(selr::zero_in_convex_hull(outside));
  Eigen::MatrixXd edge(2, 2);
  edge << 1, 1, -2, -2;
  EXPECT_TRUE(selr::zero_in_convex_hull(edge));
}

TEST(LocalWeights, NormalizedAndWindowed) {
  const Dataset d = selr::testing::random_dataset(100, 2, 1);
  const Kernel k(KernelFamily::Epanechnikov);
  const auto w = selr::local_weights(d, k, 0.2, 0.5);
  EXPECT_NEAR(w.w.sum(), 1.0, 1e-14);
  for (std::size_t j = 0; j < w.active.size(); ++j) {
    EXPECT_LT(std::abs(d.u[w.active[j]] - 0.5), 0.2);
    EXPECT_GT(w.w[static_cast<Eigen::Index>(j)], 0.0);
  }
  EXPECT_FALSE(w.thin);
  const Eigen::VectorXd dense = w.dense(d.n());
  EXPECT_NEAR(dense.sum(), 1.0, 1e-14);
  EXPECT_NEAR(w.entropy(), (w.w.array() * w.w.array().log()).sum(), 1e-14);
}

TEST(LocalWeights, EmptyAndThinWindows) {
  Eigen::VectorXd u(4), y(4);
  u << 0.0, 0.1, 0.9, 1.0;
  y << 1, 2, 3, 4;
  const Dataset d = Dataset::intercept_only(u, y);
  const Kernel k(KernelFamily::Triweight);
  try {
    selr::local_weights(d, k, 0.05, 0.5);
    FAIL() << "expected EmptyWindow";
  } catch (const selr::Error& e) {
    EXPECT_EQ(e.code(), selr::ErrorCode::EmptyWindow);
  }
  EXPECT_TRUE(selr::local_weights(d, k, 0.15, 0.05).thin);
}

TEST(MomentVectors, LayoutIsGSlowest) {
  const Dataset d = selr::testing::random_dataset(40, 2, 3);
  const Kernel k(KernelFamily::Epanechnikov);
  const auto w = selr::local_weights(d, k, 0.3, 0.4);
  LocalParameter beta = LocalParameter::zero(2);
  beta.a << 0.1, -0.2;
  beta.hb << 0.05, 0.0;
  const auto g = selr::make_smoothed_indicator({0.0, 0.5, std::numeric_limits<double>::infinity()}, 0.2);
  const Eigen::MatrixXd m = selr::moment_vectors(d, w, beta, g);
  ASSERT_EQ(m.cols(), 8);
  for (std::size_t j = 0; j < w.active.size(); ++j) {
    const Eigen::Index i = w.active[j];
    const double t = (d.u[i] - 0.4) / 0.3;
    Eigen::VectorXd z(4);
    z << d.x(i, 0), d.x(i, 1), t * d.x(i, 0), t * d.x(i, 1);
    const double r = d.y[i] - z.dot(beta.stacked());
    const Eigen::VectorXd gv = selr::eval_g(g, r);
    for (int a = 0; a < 2; ++a) {
      for (int b = 0; b < 4; ++b) {
        EXPECT_NEAR(m(static_cast<Eigen::Index>(j), a * 4 + b), gv[a] * z[b], 1e-14);
      }
    }
  }
}

TEST(LlsInit, MatchesNormalEquations) {
  const Dataset d = selr::testing::random_dataset(120, 2, 5, 0.5, 1.0);
  const Kernel k(KernelFamily::Triweight);
  for (double u0 : {0.1, 0.5, 0.93}) {
    const LocalParameter beta = selr::lls_init(d, k, 0.25, u0);
    Eigen::Matrix4d xtx = Eigen::Matrix4d::Zero();
    Eigen::Vector4d xty = Eigen::Vector4d::Zero();
    for (Eigen::Index i = 0; i < d.n(); ++i) {
      const double t = (d.u[i] - u0) / 0.25;
      const double wi = k(t);
      Eigen::Vector4d z(d.x(i, 0), d.x(i, 1), t * d.x(i, 0), t * d.x(i, 1));
      xtx += wi * z * z.transpose();
      xty += wi * z * d.y[i];
    }
    const Eigen::Vector4d ref = xtx.ldlt().solve(xty);
    EXPECT_LT((beta.stacked() - ref).norm(), 1e-10);
  }
}

TEST(LlsInit, SingularDesign) {
  Eigen::VectorXd u = Eigen::VectorXd::Constant(6, 0.5);
  Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(6, 0.0, 1.0);
  const Dataset d = Dataset::intercept_only(u, y);
  try {
    selr::lls_init(d, Kernel(KernelFamily::Epanechnikov), 0.2, 0.5);
    FAIL() << "expected SingularDesign";
  } catch (const selr::Error& e) {
    EXPECT_EQ(e.code(), selr::ErrorCode::SingularDesign);
  }
}

TEST(FitLocal, ExactlyIdentifiedGivesZeroProfile) {
  const Dataset d = selr::testing::random_dataset(150, 2, 11, 1.0, 0.5);
  const Kernel k(KernelFamily::Triweight);
  const auto w = selr::local_weights(d, k, 0.3, 0.45);
  const auto fit = selr::fit_local(d, w, selr::make_identity());
  EXPECT_EQ(fit.status, SolveStatus::Converged);
  EXPECT_NEAR(fit.logel, w.entropy(), 1e-10);
  EXPECT_LT((fit.beta.stacked() - selr::lls_init(d, w).stacked()).norm(), 1e-8);
}

TEST(FitLocal, OverIdentifiedImprovesOnStart) {
  const Dataset d = selr::testing::random_dataset(200, 1, 13, 1.0, 1.0);
  const Kernel k(KernelFamily::Epanechnikov);
  const auto g = selr::make_smoothed_indicator({0.0, 0.6, std::numeric_limits<double>::infinity()}, 0.3);
  const auto w = selr::local_weights(d, k, 0.3, 0.5);
  const LocalParameter start = selr::lls_init(d, w);
  const auto at_start = selr::local_logel(d, w, start, g);
  const auto fit = selr::fit_local(d, w, g);
  EXPECT_EQ(fit.status, SolveStatus::Converged);
  EXPECT_GE(fit.logel, at_start.logel - 1e-12);
  EXPECT_LE(fit.logel, w.entropy() + 1e-12);
  // Local optimality along random directions.
  std::mt19937_64 gen(3);
  std::normal_distribution<double> norm(0.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    Eigen::VectorXd dir(2);
    dir << norm(gen), norm(gen);
    const auto moved = selr::local_logel(
        d, w, LocalParameter::from_stacked(fit.beta.stacked() + 1e-3 * dir.normalized()), g);
    EXPECT_LE(moved.logel, fit.logel + 1e-9);
  }
}

TEST(FitLocal, HardIndicatorRejected) {
  const Dataset d = selr::testing::random_dataset(80, 1, 17);
  const auto g = selr::make_symmetric_indicator({0.0, 1.0, std::numeric_limits<double>::infinity()});
  EXPECT_THROW(selr::fit_local(d, Kernel(KernelFamily::Triweight), 0.3, 0.5, g), selr::Error);
}

TEST(FitLocal, ConstrainedIsNested) {
  const auto g = selr::make_smoothed_indicator({0.0, 0.7, std::numeric_limits<double>::infinity()}, 0.35);
  const Kernel k(KernelFamily::Triweight);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Dataset d = selr::testing::random_dataset(160, 2, seed, 1.0, 0.5);
    const auto w = selr::local_weights(d, k, 0.35, 0.5);
    const auto full = selr::fit_local(d, w, g);
    Eigen::VectorXd value(1), slope(1);
    value << 0.0;
    slope << 0.0;
    const auto constrained = selr::fit_local_constrained(d, w, g, value, slope, {1});
    EXPECT_EQ(constrained.beta.a[1], 0.0);
    EXPECT_EQ(constrained.beta.hb[1], 0.0);
    const auto refit = selr::fit_local(d, w, g, constrained.beta);
    EXPECT_LE(constrained.logel, std::max(full.logel, refit.logel) + 1e-8) << seed;
  }
}

TEST(LocalLogEL, PermutationInvariant) {
  Dataset d = selr::testing::random_dataset(90, 2, 19);
  const Kernel k(KernelFamily::Triweight);
  const auto g = selr::make_smoothed_indicator({0.0, 0.8, std::numeric_limits<double>::infinity()}, 0.4);
  LocalParameter beta = LocalParameter::zero(2);
  beta.a << 0.05, 0.0;
  const double before = selr::local_logel(d, k, 0.3, 0.5, beta, g).logel;
  std::vector<int> perm(static_cast<std::size_t>(d.n()));
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), std::mt19937(4));
  Dataset p = d;
  for (Eigen::Index i = 0; i < d.n(); ++i) {
    p.u[i] = d.u[perm[i]];
    p.x.row(i) = d.x.row(perm[i]);
    p.y[i] = d.y[perm[i]];
  }
  EXPECT_NEAR(selr::local_logel(p, k, 0.3, 0.5, beta, g).logel, before, 1e-10);
}

TEST(LocalLogEL, InfeasibleThrows) {
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(20, 0.0, 1.0);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(20, 5.0);
  const Dataset d = Dataset::intercept_only(u, y);
  try {
    selr::local_logel(d, Kernel(KernelFamily::Triweight), 0.3, 0.5, LocalParameter::zero(1),
                      selr::make_identity());
    FAIL() << "expected Infeasible";
  } catch (const selr::Error& e) {
    EXPECT_EQ(e.code(), selr::ErrorCode::Infeasible);
  }
}

}  // namespace
