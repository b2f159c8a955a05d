#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include "selr/dataset.hpp"

namespace selr::testing {

/// y = sum_k a_k(u) x_k + sd(u) eps with x_1 = 1 and the remaining
/// covariates standard normal; a_k(u) = slope_k * u.
inline Dataset random_dataset(int n, int p, std::uint64_t seed, double noise = 1.0,
                              double slope = 0.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> norm(0.0, 1.0);
  Dataset d;
  d.u.resize(n);
  d.x.resize(n, p);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    d.u[i] = unif(gen);
    d.x(i, 0) = 1.0;
    for (int k = 1; k < p; ++k) d.x(i, k) = norm(gen);
    double mean = 0.0;
    for (int k = 0; k < p; ++k) mean += slope * (k + 1) * d.u[i] * d.x(i, k);
    d.y[i] = mean + noise * norm(gen);
  }
  return d;
}

}  // namespace selr::testing
