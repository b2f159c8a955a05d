#include <cmath>

#include "selr/error.hpp"
#include "selr/parallel.hpp"
#include "selr/rng.hpp"
#include "selr/selr.hpp"

namespace selr {

const char* to_string(BootstrapScheme scheme) {
  switch (scheme) {
    case BootstrapScheme::Gaussian: return "gaussian";
    case BootstrapScheme::Wild: return "wild";
    case BootstrapScheme::Resample: return "resample";
  }
  return "unknown";
}

BootstrapScheme parse_bootstrap_scheme(const std::string& name) {
  if (name == "gaussian") return BootstrapScheme::Gaussian;
  if (name == "wild") return BootstrapScheme::Wild;
  if (name == "resample") return BootstrapScheme::Resample;
  throw Error(ErrorCode::ConfigError, "unknown bootstrap scheme '" + name + "'");
}

NullFit null_fit(const Dataset& data, const Kernel& kernel, double h,
                 const EstimatingFunction& g, const HypothesisSpec& spec,
                 const SelrOptions& options) {
  spec.validate(data.p());
  const Eigen::Index n = data.n();
  NullFit out;
  out.fitted = Eigen::VectorXd::Zero(n);
  switch (spec.kind) {
    case HypothesisKind::SimpleNull:
      out.fitted = data.y - subtract_null(data, spec.a0).y;
      break;
    case HypothesisKind::ParametricNull: {
      const Eigen::VectorXd init =
          spec.theta_init ? *spec.theta_init : Eigen::VectorXd::Zero(spec.family->theta_dim);
      const BiasCorrection bc = bias_correct(data, *spec.family, init);
      out.fitted = data.y - bc.transformed.y;
      break;
    }
    case HypothesisKind::CompositeNull: {
      const auto p1 = static_cast<Eigen::Index>(spec.fixed_idx.size());
      parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        const double u0 = data.u[i];
        Eigen::VectorXd value(p1), slope(p1);
        for (Eigen::Index j = 0; j < p1; ++j) {
          value[j] = spec.a10[static_cast<std::size_t>(j)].value(u0);
          slope[j] = spec.a10[static_cast<std::size_t>(j)].derivative(u0);
        }
        const LocalWeights w = local_weights(data, kernel, h, u0);
        const LocalELFit fit = fit_local_constrained(data, w, g, value, slope, spec.fixed_idx,
                                                     std::nullopt, options.fit);
        out.fitted[i] = data.x.row(i).dot(fit.beta.a);
      });
      break;
    }
    case HypothesisKind::GoodnessOfFit: {
      const bool smooth = g.kind() != EstimatingKind::SymmetricIndicator;
      parallel_for(static_cast<std::size_t>(n), options.threads, [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        const LocalWeights w = local_weights(data, kernel, h, data.u[i]);
        LocalParameter beta = LocalParameter::zero(data.p());
        if (spec.no_estimated_coefficients) {
          // Nothing is estimated under this null.
        } else if (smooth) {
          beta = fit_local(data, w, g, std::nullopt, options.fit).beta;
        } else {
          try {
            beta = lls_init(data, w);
          } catch (const Error&) {
          }
        }
        out.fitted[i] = data.x.row(i).dot(beta.a);
      });
      break;
    }
  }
  out.residuals = data.y - out.fitted;
  return out;
}

Dataset bootstrap_replicate(const Dataset& data, const NullFit& fit, const Kernel& kernel,
                            double h, BootstrapScheme scheme, std::uint64_t seed,
                            std::uint64_t replicate) {
  CounterRng rng(seed, mix_stream(0xB007u, replicate));
  const Eigen::Index n = data.n();
  Dataset out = data;
  switch (scheme) {
    case BootstrapScheme::Gaussian: {
      // Conditional variance from a kernel smooth of squared null residuals.
      for (Eigen::Index i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double wk = kernel((data.u[k] - data.u[i]) / h);
          num += wk * fit.residuals[k] * fit.residuals[k];
          den += wk;
        }
        const double sd = den > 0.0 ? std::sqrt(num / den) : 0.0;
        out.y[i] = fit.fitted[i] + sd * rng.normal();
      }
      break;
    }
    case BootstrapScheme::Wild:
      for (Eigen::Index i = 0; i < n; ++i) {
        out.y[i] = fit.fitted[i] + fit.residuals[i] * rng.rademacher();
      }
      break;
    case BootstrapScheme::Resample: {
      const double mean = fit.residuals.mean();
      for (Eigen::Index i = 0; i < n; ++i) {
        const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
        out.y[i] = fit.fitted[i] + fit.residuals[j] - mean;
      }
      break;
    }
  }
  return out;
}

double bootstrap_pvalue(double observed, const std::vector<double>& replicates) {
  std::size_t exceed = 0;
  for (double r : replicates) {
    if (r >= observed) ++exceed;
  }
  return static_cast<double>(1 + exceed) / static_cast<double>(replicates.size() + 1);
}

BootstrapResult bootstrap_null(const Dataset& data, const Kernel& kernel, double h,
                               const EstimatingFunction& g, const HypothesisSpec& spec, int B,
                               BootstrapScheme scheme, std::uint64_t seed,
                               const SelrOptions& options) {
  if (B < 1) throw Error(ErrorCode::InvalidArgument, "bootstrap needs B >= 1");
  BootstrapResult out;
  out.observed = selr_test(data, kernel, h, g, spec, options).statistic;
  const NullFit fit = null_fit(data, kernel, h, g, spec, options);

  SelrOptions inner = options;
  inner.threads = 1;
  inner.per_point = false;
  std::vector<double> stats(static_cast<std::size_t>(B));
  std::vector<char> ok(static_cast<std::size_t>(B), 1);
  parallel_for(static_cast<std::size_t>(B), options.threads, [&](std::size_t r) {
    const Dataset rep = bootstrap_replicate(data, fit, kernel, h, scheme, seed, r);
    try {
      stats[r] = selr_test(rep, kernel, h, g, spec, inner).statistic;
    } catch (const Error&) {
      ok[r] = 0;
    }
  });
  for (std::size_t r = 0; r < stats.size(); ++r) {
    if (ok[r]) {
      out.replicates.push_back(stats[r]);
    } else {
      ++out.failures;
    }
  }
  if (out.replicates.empty()) {
    throw Error(ErrorCode::AllInfeasible, "every bootstrap replicate failed");
  }
  if (out.failures > 0.05 * B) {
    out.warnings.push_back(std::to_string(out.failures) + " of " + std::to_string(B) +
                           " bootstrap replicates failed");
  }
  out.p_value = bootstrap_pvalue(out.observed, out.replicates);
  return out;
}

}  // namespace selr
