#pragma once

namespace selr {

/// Upper tail P(X > x) of a chi-squared variable with (possibly fractional)
/// `df` degrees of freedom, i.e. a gamma(df/2, scale 2) tail.
double chisq_upper_tail(double x, double df);

/// Lower tail P(X <= x).
double chisq_cdf(double x, double df);

/// Normal approximation 1 - Phi((x - df) / sqrt(2 df)).
double chisq_upper_tail_normal(double x, double df);

double normal_quantile(double p);
double normal_cdf(double x);

}  // namespace selr
