#pragma once

#include <functional>

namespace selr {

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Adaptive 7/15-point Gauss-Kronrod on [a, b]. Subdivides by bisection
/// until the summed error estimate meets max(abs_tol, rel_tol * |I|).
/// When the interval budget is exhausted the result falls back to a fixed
/// composite rule with `fallback_panels` panels and `converged` is false.
QuadratureResult integrate(const std::function<double(double)>& f, double a,
                           double b, double rel_tol = 1e-8,
                           double abs_tol = 1e-14, int max_intervals = 2000,
                           int fallback_panels = 2048);

}  // namespace selr
