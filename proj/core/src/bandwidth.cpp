#include <algorithm>
#include <cmath>
#include <limits>

#include "selr/error.hpp"
#include "selr/parallel.hpp"
#include "selr/selr.hpp"

namespace selr {

std::vector<double> default_bandwidth_grid(Eigen::Index n, double scale) {
  if (n < 1 || !(scale > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bandwidth grid needs n >= 1 and scale > 0");
  }
  const double base = scale * std::pow(static_cast<double>(n), -2.0 / 9.0);
  return {0.5 * base, 1.0 * base, 1.5 * base, 2.0 * base};
}

double standardized_statistic(const TestResult& result) {
  const double df = result.calibration.df;
  if (!(df > 0.0)) {
    throw Error(ErrorCode::DegenerateTest, "standardized statistic needs df > 0");
  }
  return (result.calibration.r_K * result.statistic - df) / std::sqrt(2.0 * df);
}

namespace {

// Standardized values over the grid; NaN where the statistic failed.
std::vector<double> grid_values(const Dataset& data, const Kernel& kernel,
                                const EstimatingFunction& g, const HypothesisSpec& spec,
                                const std::vector<double>& grid, const SelrOptions& options) {
  std::vector<double> out(grid.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    try {
      out[k] = standardized_statistic(selr_test(data, kernel, grid[k], g, spec, options));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::InvalidArgument) throw;
    }
  }
  return out;
}

double nan_max(const std::vector<double>& v) {
  double best = -std::numeric_limits<double>::infinity();
  for (double x : v) {
    if (std::isfinite(x)) best = std::max(best, x);
  }
  return best;
}

}  // namespace

BandwidthSelection select_bandwidth(const Dataset& data, const Kernel& kernel,
                                    const EstimatingFunction& g, const HypothesisSpec& spec,
                                    const std::vector<double>& grid, int B,
                                    BootstrapScheme scheme, std::uint64_t seed,
                                    const SelrOptions& options) {
  if (grid.empty()) throw Error(ErrorCode::InvalidGrid, "bandwidth grid is empty");
  for (double h : grid) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::InvalidGrid, "bandwidths must be positive and finite");
    }
  }
  BandwidthSelection out;
  out.grid = grid;
  out.standardized = grid_values(data, kernel, g, spec, grid, options);
  std::size_t best = grid.size();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!std::isfinite(out.standardized[k])) continue;
    if (best == grid.size() || out.standardized[k] > out.standardized[best]) best = k;
  }
  if (best == grid.size()) {
    throw Error(ErrorCode::AllInfeasible, "no bandwidth in the grid gave a usable statistic");
  }
  out.h_hat = grid[best];
  out.max_standardized = out.standardized[best];

  if (B > 0) {
    // One null fit and one set of replicate datasets shared by every h.
    const NullFit fit = null_fit(data, kernel, out.h_hat, g, spec, options);
    SelrOptions inner = options;
    inner.threads = 1;
    inner.per_point = false;
    std::vector<double> maxima(static_cast<std::size_t>(B));
    parallel_for(maxima.size(), options.threads, [&](std::size_t r) {
      const Dataset rep = bootstrap_replicate(data, fit, kernel, out.h_hat, scheme, seed, r);
      maxima[r] = nan_max(grid_values(rep, kernel, g, spec, grid, inner));
    });
    int failures = 0;
    for (double m : maxima) {
      if (std::isfinite(m)) {
        out.replicate_max.push_back(m);
      } else {
        ++failures;
      }
    }
    if (out.replicate_max.empty()) {
      throw Error(ErrorCode::AllInfeasible, "every bootstrap replicate failed");
    }
    out.p_bootstrap = bootstrap_pvalue(out.max_standardized, out.replicate_max);
  }
  return out;
}

}  // namespace selr
