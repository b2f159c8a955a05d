#include "selr/chisq.hpp"

#include <cmath>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "selr/error.hpp"

namespace selr {

double chisq_upper_tail(double x, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorCode::DegenerateTest, "chi-squared tail needs df > 0");
  }
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::gamma_q(0.5 * df, 0.5 * x);
}

double chisq_cdf(double x, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorCode::DegenerateTest, "chi-squared cdf needs df > 0");
  }
  if (std::isnan(x)) return x;
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  return boost::math::gamma_p(0.5 * df, 0.5 * x);
}

double chisq_upper_tail_normal(double x, double df) {
  if (!(df > 0.0)) {
    throw Error(ErrorCode::DegenerateTest, "chi-squared tail needs df > 0");
  }
  return 1.0 - normal_cdf((x - df) / std::sqrt(2.0 * df));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
  if (p <= 0.0) return -INFINITY;
  if (p >= 1.0) return INFINITY;
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

}  // namespace selr
