#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "selr/dataset.hpp"
#include "selr/estimating_function.hpp"
#include "selr/kernel.hpp"
#include "selr/local_el.hpp"

namespace selr {

enum class HypothesisKind { GoodnessOfFit, SimpleNull, CompositeNull, ParametricNull };

const char* to_string(HypothesisKind kind);

/// A known coefficient function a(u) with its derivative.
struct CoefficientFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;

  static CoefficientFunction zero();
  static CoefficientFunction constant(double c);
  static CoefficientFunction linear(double intercept, double slope);
};

/// Parametric coefficient family u, theta -> A(u, theta) in R^p.
struct ParametricFamily {
  std::string name;
  int theta_dim = 0;
  std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)> eval;

  /// A(u, theta) = theta (homogeneity); theta_dim = p.
  static ParametricFamily constant(int p);
  /// a_k(u) = theta_k + theta_{p+k} u; theta_dim = 2p.
  static ParametricFamily linear(int p);
};

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const noexcept { return hi - lo; }
  bool contains(double u) const noexcept { return u >= lo && u <= hi; }
};

struct HypothesisSpec {
  HypothesisKind kind = HypothesisKind::SimpleNull;
  /// SimpleNull: one function per covariate. Empty means A0 = 0.
  std::vector<CoefficientFunction> a0;
  /// CompositeNull: pinned coefficient indices and their null functions.
  std::vector<int> fixed_idx;
  std::vector<CoefficientFunction> a10;
  /// ParametricNull.
  std::optional<ParametricFamily> family;
  std::optional<Eigen::VectorXd> theta_init;
  /// Interval over which the statistic is summed; default [min U, max U].
  std::optional<Interval> omega;
  /// SimpleNull with k0 = 1: add the full-model term l(G) as well.
  bool include_full_term = false;
  /// GoodnessOfFit: no coefficients are estimated, so df uses k0 not k0 - 1.
  bool no_estimated_coefficients = false;

  /// Throws InvalidArgument on an inconsistent spec for a model with p covariates.
  void validate(Eigen::Index p) const;
};

enum class PValueMethod { Gamma, Normal };

struct TestCalibration {
  double r_K = 0.0;
  double c_K = 0.0;
  double df = 0.0;
  double omega_len = 0.0;
  /// Fraction of evaluation points retained after the skip policy.
  double retained_fraction = 1.0;
  double h = 0.0;
  HypothesisKind kind = HypothesisKind::SimpleNull;
  /// df / (|Omega| c_K / h): (k0-1)p, k0 p, p or p1.
  double dof_factor = 0.0;
  bool degenerate = false;
};

struct PointDiagnostic {
  double u0 = 0.0;
  double null_term = 0.0;
  double full_term = 0.0;
  double contribution = 0.0;
  std::string status;
};

struct TestResult {
  HypothesisKind kind = HypothesisKind::SimpleNull;
  double statistic = 0.0;
  double scaled = 0.0;
  TestCalibration calibration;
  std::optional<double> p_asymptotic;
  std::optional<double> p_bootstrap;
  int bootstrap_reps = 0;
  int n_evaluated = 0;
  int n_skipped = 0;
  int n_clamped = 0;
  std::optional<Eigen::VectorXd> theta_hat;
  std::vector<std::string> warnings;
  std::vector<PointDiagnostic> per_point;
};

struct SelrOptions {
  int threads = 1;
  bool per_point = false;
  PValueMethod pvalue = PValueMethod::Gamma;
  FitOptions fit;
};

/// sum_j sum_i w_h(U_i, U_j) log w_h(U_i, U_j) over all observations j.
double sel_entropy(const Dataset& data, const Kernel& kernel, double h);

/// sum_j l(beta_hat(U_j), U_j) over U_j in omega (default: all j).
/// Throws Infeasible if some local fit is infeasible.
double sel_full(const Dataset& data, const Kernel& kernel, double h,
                const EstimatingFunction& g, const std::optional<Interval>& omega = std::nullopt,
                const SelrOptions& options = {});

TestResult selr_gof(const Dataset& data, const Kernel& kernel, double h,
                    const EstimatingFunction& g, const HypothesisSpec& spec,
                    const SelrOptions& options = {});
TestResult selr_simple(const Dataset& data, const Kernel& kernel, double h,
                       const EstimatingFunction& g, const HypothesisSpec& spec,
                       const SelrOptions& options = {});
TestResult selr_composite(const Dataset& data, const Kernel& kernel, double h,
                          const EstimatingFunction& g, const HypothesisSpec& spec,
                          const SelrOptions& options = {});
/// bias_correct followed by selr_simple with A0 = 0 on the transformed data.
TestResult selr_parametric(const Dataset& data, const Kernel& kernel, double h,
                           const EstimatingFunction& g, const HypothesisSpec& spec,
                           const SelrOptions& options = {});

/// Dispatches on spec.kind.
TestResult selr_test(const Dataset& data, const Kernel& kernel, double h,
                     const EstimatingFunction& g, const HypothesisSpec& spec,
                     const SelrOptions& options = {});

/// Upper tail of r_K * stat under chi-squared with cal.df degrees of
/// freedom. Throws DegenerateTest when df is zero.
double asymptotic_pvalue(double stat, const TestCalibration& cal,
                         PValueMethod method = PValueMethod::Gamma);

/// Response with the known null coefficients removed: y - A0(u)^T x.
Dataset subtract_null(const Dataset& data, const std::vector<CoefficientFunction>& a0);

// ---------------------------------------------------------------------------
// Bootstrap calibration

enum class BootstrapScheme { Gaussian, Wild, Resample };

const char* to_string(BootstrapScheme scheme);
BootstrapScheme parse_bootstrap_scheme(const std::string& name);

struct BootstrapResult {
  double observed = 0.0;
  std::vector<double> replicates;  ///< successful replicate statistics, in replicate order
  int failures = 0;
  double p_value = 1.0;
  std::vector<std::string> warnings;
};

/// Null fit used to generate bootstrap data: fitted values under H0 and the
/// corresponding residuals.
struct NullFit {
  Eigen::VectorXd fitted;
  Eigen::VectorXd residuals;
};

NullFit null_fit(const Dataset& data, const Kernel& kernel, double h,
                 const EstimatingFunction& g, const HypothesisSpec& spec,
                 const SelrOptions& options = {});

/// Replicate dataset r of the bootstrap: fitted + errors drawn by `scheme`
/// from the stream (seed, r).
Dataset bootstrap_replicate(const Dataset& data, const NullFit& fit, const Kernel& kernel,
                            double h, BootstrapScheme scheme, std::uint64_t seed,
                            std::uint64_t replicate);

/// (1 + #{replicates >= observed}) / (B + 1) over the given replicates.
double bootstrap_pvalue(double observed, const std::vector<double>& replicates);

BootstrapResult bootstrap_null(const Dataset& data, const Kernel& kernel, double h,
                               const EstimatingFunction& g, const HypothesisSpec& spec,
                               int B, BootstrapScheme scheme, std::uint64_t seed,
                               const SelrOptions& options = {});

// ---------------------------------------------------------------------------
// Bandwidth selection

struct BandwidthSelection {
  double h_hat = 0.0;
  double max_standardized = 0.0;
  std::vector<double> grid;
  std::vector<double> standardized;
  std::optional<double> p_bootstrap;
  std::vector<double> replicate_max;
};

/// (0.5, 1, 1.5, 2) * scale * n^(-2/9).
std::vector<double> default_bandwidth_grid(Eigen::Index n, double scale = 1.0);

/// (r_K l - df) / sqrt(2 df) for one bandwidth.
double standardized_statistic(const TestResult& result);

/// Picks the h maximizing the standardized statistic. With B > 0 the max is
/// calibrated by bootstrap replicates shared across the whole grid.
BandwidthSelection select_bandwidth(const Dataset& data, const Kernel& kernel,
                                    const EstimatingFunction& g, const HypothesisSpec& spec,
                                    const std::vector<double>& grid, int B = 0,
                                    BootstrapScheme scheme = BootstrapScheme::Gaussian,
                                    std::uint64_t seed = 0, const SelrOptions& options = {});

// ---------------------------------------------------------------------------
// Bias correction for parametric nulls

struct BiasCorrection {
  Eigen::VectorXd theta_hat;
  Dataset transformed;
  int iterations = 0;
};

/// Nonlinear least squares of Y on A(U, theta)^T X (Levenberg-Marquardt)
/// and the transformed response y - A(u, theta_hat)^T x.
BiasCorrection bias_correct(const Dataset& data, const ParametricFamily& family,
                            const Eigen::VectorXd& theta_init);

}  // namespace selr
