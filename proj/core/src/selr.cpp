#include "selr/selr.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "selr/chisq.hpp"
#include "selr/error.hpp"
#include "selr/parallel.hpp"

namespace selr {
namespace {

struct PointTerms {
  double null_term = 0.0;
  double full_term = 0.0;
  bool ok = true;
  bool max_iter = false;
  std::string status = "converged";
};

Interval resolve_omega(const Dataset& data, const std::optional<Interval>& omega) {
  if (omega) return *omega;
  return {data.u.minCoeff(), data.u.maxCoeff()};
}

std::vector<Eigen::Index> evaluation_points(const Dataset& data, const Interval& omega) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    if (omega.contains(data.u[j])) idx.push_back(j);
  }
  return idx;
}

// Runs `term` at every evaluation point and applies the skip policy.
template <class Term>
TestResult sweep(const Dataset& data, const Kernel& kernel, double h, const Interval& omega,
                 const SelrOptions& options, Term&& term) {
  const auto points = evaluation_points(data, omega);
  if (points.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no observation falls inside the test interval");
  }
  std::vector<PointTerms> terms(points.size());
  parallel_for(points.size(), options.threads, [&](std::size_t k) {
    const double u0 = data.u[points[k]];
    const LocalWeights w = local_weights(data, kernel, h, u0);
    if (w.thin) {
      terms[k].ok = false;
      terms[k].status = "thin";
      return;
    }
    terms[k] = term(w);
  });

  TestResult out;
  out.n_evaluated = static_cast<int>(points.size());
  int max_iter = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const PointTerms& t = terms[k];
    const double contribution = t.null_term - t.full_term;
    if (t.ok) {
      out.statistic += contribution;
      if (contribution < 0.0) ++out.n_clamped;
      if (t.max_iter) ++max_iter;
    } else {
      ++out.n_skipped;
    }
    if (options.per_point) {
      out.per_point.push_back({data.u[points[k]], t.null_term, t.full_term,
                               t.ok ? contribution : 0.0, t.status});
    }
  }
  // Retained share of omega: each point owns the stretch of omega closer to it
  // than to any other evaluation point.
  std::vector<std::size_t> order(points.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.u[points[a]] < data.u[points[b]];
  });
  double covered = 0.0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (!terms[order[r]].ok) continue;
    const double u = data.u[points[order[r]]];
    const double lo = r == 0 ? omega.lo : 0.5 * (u + data.u[points[order[r - 1]]]);
    const double hi = r + 1 == order.size() ? omega.hi : 0.5 * (u + data.u[points[order[r + 1]]]);
    covered += hi - lo;
  }
  out.calibration.retained_fraction =
      omega.length() > 0.0 ? std::clamp(covered / omega.length(), 0.0, 1.0)
                           : static_cast<double>(out.n_evaluated - out.n_skipped) /
                                 static_cast<double>(out.n_evaluated);
  if (out.n_skipped == out.n_evaluated) {
    throw Error(ErrorCode::AllInfeasible, "every evaluation point was infeasible or thin");
  }
  if (out.n_skipped > 0) {
    out.warnings.push_back(std::to_string(out.n_skipped) +
                           " evaluation points skipped (infeasible or thin window)");
  }
  if (max_iter > 0) {
    out.warnings.push_back(std::to_string(max_iter) +
                           " local fits stopped at the iteration limit");
  }
  return out;
}

void finalize(TestResult& out, const Kernel& kernel, double h, const Interval& omega,
              double dof_factor, const SelrOptions& options) {
  const KernelConstants kc = kernel_constants(kernel);
  TestCalibration& cal = out.calibration;
  cal.kind = out.kind;
  cal.r_K = kc.r_K;
  cal.c_K = kc.c_K;
  cal.h = h;
  cal.omega_len = omega.length();
  cal.dof_factor = dof_factor;
  cal.df = dof_factor * cal.omega_len * cal.retained_fraction * kc.c_K / h;
  cal.degenerate = !(cal.df > 0.0);
  out.scaled = cal.r_K * out.statistic;
  if (cal.degenerate) {
    out.warnings.push_back("DegenerateTest: zero degrees of freedom (k0 = 1 goodness of fit)");
  } else {
    out.p_asymptotic = asymptotic_pvalue(out.statistic, cal, options.pvalue);
  }
}

PointTerms dual_term(const Dataset& data, const LocalWeights& w, const LocalParameter& beta,
                     const EstimatingFunction& g) {
  PointTerms t;
  const Eigen::MatrixXd m = moment_vectors(data, w, beta, g);
  const DualSolution sol = solve_lagrange(m, w.w);
  t.null_term = sol.value;
  if (sol.status != SolveStatus::Converged) {
    t.ok = false;
    t.status = to_string(sol.status);
  }
  return t;
}

bool usable(const LocalELFit& fit) { return fit.status != SolveStatus::Infeasible; }

void check_common(const Dataset& data, double h) {
  data.validate();
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive and finite");
  }
}

}  // namespace

const char* to_string(HypothesisKind kind) {
  switch (kind) {
    case HypothesisKind::GoodnessOfFit: return "goodness_of_fit";
    case HypothesisKind::SimpleNull: return "simple_null";
    case HypothesisKind::CompositeNull: return "composite_null";
    case HypothesisKind::ParametricNull: return "parametric_null";
  }
  return "unknown";
}

CoefficientFunction CoefficientFunction::zero() { return constant(0.0); }

CoefficientFunction CoefficientFunction::constant(double c) {
  return {[c](double) { return c; }, [](double) { return 0.0; }};
}

CoefficientFunction CoefficientFunction::linear(double intercept, double slope) {
  return {[=](double u) { return intercept + slope * u; }, [slope](double) { return slope; }};
}

ParametricFamily ParametricFamily::constant(int p) {
  return {"constant", p, [](double, const Eigen::VectorXd& theta) { return Eigen::VectorXd(theta); }};
}

ParametricFamily ParametricFamily::linear(int p) {
  return {"linear", 2 * p, [p](double u, const Eigen::VectorXd& theta) {
            Eigen::VectorXd a = theta.head(p) + u * theta.tail(p);
            return a;
          }};
}

void HypothesisSpec::validate(Eigen::Index p) const {
  if (omega && !(omega->lo < omega->hi)) {
    throw Error(ErrorCode::InvalidArgument, "test interval must satisfy lo < hi");
  }
  switch (kind) {
    case HypothesisKind::GoodnessOfFit:
      break;
    case HypothesisKind::SimpleNull:
      if (!a0.empty() && static_cast<Eigen::Index>(a0.size()) != p) {
        throw Error(ErrorCode::InvalidArgument, "simple null needs one function per covariate");
      }
      for (const auto& f : a0) {
        if (!f.value) throw Error(ErrorCode::InvalidArgument, "null coefficient function is empty");
      }
      break;
    case HypothesisKind::CompositeNull: {
      const auto p1 = static_cast<Eigen::Index>(fixed_idx.size());
      if (p1 < 1 || p1 >= p) {
        throw Error(ErrorCode::InvalidArgument, "composite null needs 1 <= p1 < p");
      }
      if (a10.size() != fixed_idx.size()) {
        throw Error(ErrorCode::InvalidArgument,
                    "composite null needs one function per fixed coefficient");
      }
      for (const auto& f : a10) {
        if (!f.value || !f.derivative) {
          throw Error(ErrorCode::InvalidArgument,
                      "composite null functions need values and derivatives");
        }
      }
      break;
    }
    case HypothesisKind::ParametricNull:
      if (!family || family->theta_dim < 1 || !family->eval) {
        throw Error(ErrorCode::InvalidArgument, "parametric null needs a family");
      }
      if (theta_init && theta_init->size() != family->theta_dim) {
        throw Error(ErrorCode::InvalidArgument, "theta_init has the wrong dimension");
      }
      break;
  }
}

double asymptotic_pvalue(double stat, const TestCalibration& cal, PValueMethod method) {
  if (!(cal.df > 0.0)) {
    throw Error(ErrorCode::DegenerateTest, "asymptotic p-value undefined for df = 0");
  }
  const double x = cal.r_K * stat;
  if (method == PValueMethod::Normal) return chisq_upper_tail_normal(x, cal.df);
  return chisq_upper_tail(x, cal.df);
}

Dataset subtract_null(const Dataset& data, const std::vector<CoefficientFunction>& a0) {
  Dataset out = data;
  if (a0.empty()) return out;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    double fit = 0.0;
    for (Eigen::Index k = 0; k < data.p(); ++k) {
      fit += a0[static_cast<std::size_t>(k)].value(data.u[i]) * data.x(i, k);
    }
    out.y[i] = data.y[i] - fit;
  }
  return out;
}

double sel_entropy(const Dataset& data, const Kernel& kernel, double h) {
  check_common(data, h);
  double total = 0.0;
  for (Eigen::Index j = 0; j < data.n(); ++j) {
    total += local_weights(data, kernel, h, data.u[j]).entropy();
  }
  return total;
}

double sel_full(const Dataset& data, const Kernel& kernel, double h,
                const EstimatingFunction& g, const std::optional<Interval>& omega,
                const SelrOptions& options) {
  check_common(data, h);
  const auto points = evaluation_points(data, resolve_omega(data, omega));
  std::vector<double> logel(points.size());
  parallel_for(points.size(), options.threads, [&](std::size_t k) {
    const LocalWeights w = local_weights(data, kernel, h, data.u[points[k]]);
    const LocalELFit fit = fit_local(data, w, g, std::nullopt, options.fit);
    if (!usable(fit)) {
      throw Error(ErrorCode::Infeasible,
                  "local fit infeasible at u0 = " + std::to_string(data.u[points[k]]));
    }
    logel[k] = fit.logel;
  });
  double total = 0.0;
  for (double v : logel) total += v;
  return total;
}

TestResult selr_gof(const Dataset& data, const Kernel& kernel, double h,
                    const EstimatingFunction& g, const HypothesisSpec& spec,
                    const SelrOptions& options) {
  check_common(data, h);
  spec.validate(data.p());
  const Interval omega = resolve_omega(data, spec.omega);
  const bool fixed = spec.no_estimated_coefficients;
  TestResult out = sweep(data, kernel, h, omega, options, [&](const LocalWeights& w) {
    if (fixed) {
      return dual_term(data, w, LocalParameter::zero(data.p()), g);
    }
    const LocalELFit fit = fit_local(data, w, g, std::nullopt, options.fit);
    PointTerms t;
    t.null_term = w.entropy() - fit.logel;
    t.ok = usable(fit);
    t.max_iter = fit.status == SolveStatus::MaxIter;
    t.status = to_string(fit.status);
    return t;
  });
  out.kind = HypothesisKind::GoodnessOfFit;
  out.n_clamped = 0;
  const double k0 = g.k0();
  const double factor = (fixed ? k0 : k0 - 1.0) * static_cast<double>(data.p());
  finalize(out, kernel, h, omega, factor, options);
  return out;
}

TestResult selr_simple(const Dataset& data, const Kernel& kernel, double h,
                       const EstimatingFunction& g, const HypothesisSpec& spec,
                       const SelrOptions& options) {
  check_common(data, h);
  spec.validate(data.p());
  const Dataset star = subtract_null(data, spec.a0);
  const Interval omega = resolve_omega(data, spec.omega);
  const bool full = spec.include_full_term || g.k0() > 1;
  const LocalParameter zero = LocalParameter::zero(data.p());
  TestResult out = sweep(star, kernel, h, omega, options, [&](const LocalWeights& w) {
    PointTerms t = dual_term(star, w, zero, g);
    if (!t.ok || !full) return t;
    // Seeded at the null value so the full term cannot exceed the null term.
    const LocalELFit fit = fit_local(star, w, g, zero, options.fit);
    if (!usable(fit)) {
      t.ok = false;
      t.status = to_string(fit.status);
      return t;
    }
    t.full_term = w.entropy() - fit.logel;
    t.max_iter = fit.status == SolveStatus::MaxIter;
    t.status = to_string(fit.status);
    return t;
  });
  out.kind = HypothesisKind::SimpleNull;
  finalize(out, kernel, h, omega, static_cast<double>(data.p()), options);
  return out;
}

TestResult selr_composite(const Dataset& data, const Kernel& kernel, double h,
                          const EstimatingFunction& g, const HypothesisSpec& spec,
                          const SelrOptions& options) {
  check_common(data, h);
  if (spec.kind != HypothesisKind::CompositeNull) {
    throw Error(ErrorCode::InvalidArgument, "selr_composite needs a composite hypothesis");
  }
  spec.validate(data.p());
  const Interval omega = resolve_omega(data, spec.omega);
  const auto p1 = static_cast<Eigen::Index>(spec.fixed_idx.size());
  TestResult out = sweep(data, kernel, h, omega, options, [&](const LocalWeights& w) {
    Eigen::VectorXd value(p1), slope(p1);
    for (Eigen::Index k = 0; k < p1; ++k) {
      value[k] = spec.a10[static_cast<std::size_t>(k)].value(w.u0);
      slope[k] = spec.a10[static_cast<std::size_t>(k)].derivative(w.u0);
    }
    PointTerms t;
    const LocalELFit constrained =
        fit_local_constrained(data, w, g, value, slope, spec.fixed_idx, std::nullopt, options.fit);
    if (!usable(constrained)) {
      t.ok = false;
      t.status = to_string(constrained.status);
      return t;
    }
    t.null_term = w.entropy() - constrained.logel;
    const LocalELFit fit = fit_local(data, w, g, constrained.beta, options.fit);
    if (!usable(fit)) {
      t.ok = false;
      t.status = to_string(fit.status);
      return t;
    }
    t.full_term = w.entropy() - fit.logel;
    t.max_iter = constrained.status == SolveStatus::MaxIter || fit.status == SolveStatus::MaxIter;
    t.status = t.max_iter ? "max_iter" : "converged";
    return t;
  });
  out.kind = HypothesisKind::CompositeNull;
  finalize(out, kernel, h, omega, static_cast<double>(p1), options);
  return out;
}

TestResult selr_parametric(const Dataset& data, const Kernel& kernel, double h,
                           const EstimatingFunction& g, const HypothesisSpec& spec,
                           const SelrOptions& options) {
  check_common(data, h);
  if (spec.kind != HypothesisKind::ParametricNull) {
    throw Error(ErrorCode::InvalidArgument, "selr_parametric needs a parametric hypothesis");
  }
  spec.validate(data.p());
  const Eigen::VectorXd init =
      spec.theta_init ? *spec.theta_init : Eigen::VectorXd::Zero(spec.family->theta_dim);
  const BiasCorrection bc = bias_correct(data, *spec.family, init);
  HypothesisSpec simple = spec;
  simple.kind = HypothesisKind::SimpleNull;
  simple.a0.clear();
  if (!simple.omega) simple.omega = resolve_omega(data, spec.omega);
  TestResult out = selr_simple(bc.transformed, kernel, h, g, simple, options);
  out.kind = HypothesisKind::ParametricNull;
  out.calibration.kind = HypothesisKind::ParametricNull;
  out.theta_hat = bc.theta_hat;
  return out;
}

TestResult selr_test(const Dataset& data, const Kernel& kernel, double h,
                     const EstimatingFunction& g, const HypothesisSpec& spec,
                     const SelrOptions& options) {
  switch (spec.kind) {
    case HypothesisKind::GoodnessOfFit: return selr_gof(data, kernel, h, g, spec, options);
    case HypothesisKind::SimpleNull: return selr_simple(data, kernel, h, g, spec, options);
    case HypothesisKind::CompositeNull: return selr_composite(data, kernel, h, g, spec, options);
    case HypothesisKind::ParametricNull: return selr_parametric(data, kernel, h, g, spec, options);
  }
  throw Error(ErrorCode::InvalidArgument, "unknown hypothesis kind");
}

}  // namespace selr
