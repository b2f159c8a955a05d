#include "selr/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <mutex>
#include <optional>
#include <sstream>
#include <vector>

#include "selr/error.hpp"
#include "selr/quadrature.hpp"

namespace selr {
namespace {

constexpr double kRelTol = 1e-8;
constexpr double kSymmetryTol = 1e-6;

double checked_integral(const std::function<double(double)>& f, double a, double b,
                        const char* what) {
  QuadratureResult r = integrate(f, a, b, kRelTol, 1e-15);
  if (!r.converged) {
    throw Error(ErrorCode::QuadratureFailure,
                std::string("quadrature did not converge for ") + what);
  }
  return r.value;
}

// Gauss-Legendre on each cell between consecutive breakpoints; exact for
// piecewise polynomials of degree < 2 * order.
template <class F>
double piecewise_gauss(F&& f, std::vector<double> cuts, int order) {
  static const std::array<std::array<double, 6>, 2> kNodes6 = {
      {{-0.9324695142031521, -0.6612093864662645, -0.2386191860831969, 0.2386191860831969,
        0.6612093864662645, 0.9324695142031521},
       {0.1713244923791704, 0.3607615730481386, 0.4679139345726910, 0.4679139345726910,
        0.3607615730481386, 0.1713244923791704}}};
  static const std::array<std::array<double, 3>, 2> kNodes3 = {
      {{-0.7745966692414834, 0.0, 0.7745966692414834},
       {0.5555555555555556, 0.8888888888888888, 0.5555555555555556}}};
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
    const double a = cuts[c];
    const double b = cuts[c + 1];
    if (!(b > a)) continue;
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    double cell = 0.0;
    if (order == 6) {
      for (std::size_t k = 0; k < 6; ++k) cell += kNodes6[1][k] * f(mid + half * kNodes6[0][k]);
    } else {
      for (std::size_t k = 0; k < 3; ++k) cell += kNodes3[1][k] * f(mid + half * kNodes3[0][k]);
    }
    total += half * cell;
  }
  return total;
}

// Multiples of `step` inside [lo, hi] plus shifted copies, and the ends.
std::vector<double> grid_cuts(double lo, double hi, double step, double shift) {
  std::vector<double> cuts = {lo, hi};
  for (double offset : {0.0, shift}) {
    const auto first = static_cast<long>(std::ceil((lo + offset) / step));
    const auto last = static_cast<long>(std::floor((hi + offset) / step));
    for (long k = first; k <= last; ++k) {
      const double v = static_cast<double>(k) * step - offset;
      if (v > lo && v < hi) cuts.push_back(v);
    }
  }
  return cuts;
}

}  // namespace

Kernel::Kernel(KernelFamily family) : family_(family) {
  if (family == KernelFamily::Tabulated) {
    throw Error(ErrorCode::InvalidArgument,
                "tabulated kernels must be built with Kernel::tabulated");
  }
}

Kernel Kernel::tabulated(std::span<const double> t, std::span<const double> values) {
  if (t.size() != values.size() || t.size() < 3) {
    throw Error(ErrorCode::InvalidArgument,
                "tabulated kernel needs at least 3 (t, K(t)) pairs");
  }
  const std::size_t m = t.size();
  const double step = 2.0 / static_cast<double>(m - 1);
  for (std::size_t i = 0; i < m; ++i) {
    const double expected = -1.0 + step * static_cast<double>(i);
    if (std::abs(t[i] - expected) > 1e-9) {
      throw Error(ErrorCode::InvalidArgument,
                  "tabulated kernel grid must be uniform on [-1, 1]");
    }
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error(ErrorCode::InvalidArgument,
                  "tabulated kernel values must be finite and nonnegative");
    }
  }
  const double vmax = *std::max_element(values.begin(), values.end());
  for (std::size_t i = 0; i < m; ++i) {
    if (std::abs(values[i] - values[m - 1 - i]) > kSymmetryTol * std::max(1.0, vmax)) {
      throw Error(ErrorCode::InvalidArgument, "tabulated kernel is not symmetric");
    }
  }
  // Trapezoid rule is exact for the piecewise-linear interpolant.
  double mass = 0.0;
  for (std::size_t i = 0; i + 1 < m; ++i) mass += 0.5 * step * (values[i] + values[i + 1]);
  if (!(mass > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tabulated kernel has zero mass");
  }
  // Store the nonnegative half, symmetrized, indexed from t = 0 to t = 1.
  const std::size_t mid = (m - 1) / 2;
  auto half = std::make_shared<std::vector<double>>();
  if ((m - 1) % 2 == 0) {
    half->reserve(m - mid);
    for (std::size_t i = mid; i < m; ++i) {
      half->push_back(0.5 * (values[i] + values[m - 1 - i]) / mass);
    }
  } else {
    // Even number of samples: no node at 0, resample onto a grid that has one.
    half->reserve(m);
    const std::size_t nh = m;
    for (std::size_t k = 0; k < nh; ++k) {
      const double a = static_cast<double>(k) / static_cast<double>(nh - 1);
      const double pos = (a + 1.0) / step;
      const std::size_t lo = std::min(static_cast<std::size_t>(pos), m - 2);
      const double frac = pos - static_cast<double>(lo);
      half->push_back(((1.0 - frac) * values[lo] + frac * values[lo + 1]) / mass);
    }
  }
  Kernel k(KernelFamily::Triweight);
  k.family_ = KernelFamily::Tabulated;
  k.table_ = std::move(half);
  return k;
}

double Kernel::table_step() const noexcept {
  if (!table_) return 0.0;
  return 1.0 / static_cast<double>(table_->size() - 1);
}

double Kernel::interpolate(double abs_t) const noexcept {
  const auto& h = *table_;
  const double pos = abs_t * static_cast<double>(h.size() - 1);
  const std::size_t lo = std::min(static_cast<std::size_t>(pos), h.size() - 2);
  const double frac = pos - static_cast<double>(lo);
  return (1.0 - frac) * h[lo] + frac * h[lo + 1];
}

std::string Kernel::name() const {
  switch (family_) {
    case KernelFamily::Uniform: return "uniform";
    case KernelFamily::Epanechnikov: return "epanechnikov";
    case KernelFamily::Biweight: return "biweight";
    case KernelFamily::Triweight: return "triweight";
    case KernelFamily::Tabulated: return "tabulated";
  }
  return "unknown";
}

double kernel_eval(const Kernel& kernel, double t) { return kernel(t); }

Kernel parse_kernel(std::string_view spec) {
  if (spec == "uniform") return Kernel(KernelFamily::Uniform);
  if (spec == "epanechnikov") return Kernel(KernelFamily::Epanechnikov);
  if (spec == "biweight" || spec == "quartic") return Kernel(KernelFamily::Biweight);
  if (spec == "triweight") return Kernel(KernelFamily::Triweight);
  constexpr std::string_view prefix = "tabulated:";
  if (spec.starts_with(prefix)) {
    return load_tabulated_kernel(std::string(spec.substr(prefix.size())));
  }
  throw Error(ErrorCode::ConfigError, "unknown kernel '" + std::string(spec) + "'");
}

Kernel load_tabulated_kernel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open kernel table " + path);
  std::vector<double> t, v;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) {
      throw Error(ErrorCode::ParseError,
                  path + ":" + std::to_string(lineno) + ": expected two numbers");
    }
    t.push_back(a);
    v.push_back(b);
  }
  if (t.empty()) throw Error(ErrorCode::EmptyFile, "kernel table " + path + " is empty");
  return Kernel::tabulated(t, v);
}

double second_moment(const Kernel& kernel) {
  if (const double step = kernel.table_step(); step > 0.0) {
    return 2.0 * piecewise_gauss([&](double t) { return t * t * kernel(t); },
                                 grid_cuts(0.0, 1.0, step, 0.0), 3);
  }
  // Symmetric integrand: integrate over [0, 1] and double.
  return 2.0 * checked_integral([&](double t) { return t * t * kernel(t); }, 0.0, 1.0,
                                "second moment");
}

double kstar(const Kernel& kernel, double s, double mu2) {
  const double a = std::abs(s);
  if (a >= 2.0) return 0.0;
  // K*(-s) = K*(s): substitute t -> -t - s. Evaluate at |s| so the result is
  // exactly symmetric.
  const double lo = -1.0;
  const double hi = 1.0 - a;
  auto integrand = [&](double t) {
    const double u = a + t;
    return kernel(t) * kernel(u) * (1.0 + t * u / mu2);
  };
  if (const double step = kernel.table_step(); step > 0.0) {
    return piecewise_gauss(integrand, grid_cuts(lo, hi, step, a), 3);
  }
  return checked_integral(integrand, lo, hi, "K*");
}

double kstar(const Kernel& kernel, double s) {
  return kstar(kernel, s, second_moment(kernel));
}

namespace {

KernelConstants compute_constants(const Kernel& kernel) {
  KernelConstants c;
  c.mu2 = second_moment(kernel);
  c.kstar0 = kstar(kernel, 0.0, c.mu2);
  const double mu2 = c.mu2;
  const auto squared = [&](double s) {
    const double v = kstar(kernel, s, mu2);
    return v * v;
  };
  if (const double step = kernel.table_step(); step > 0.0) {
    c.kstar_l2 = 2.0 * piecewise_gauss(squared, grid_cuts(0.0, 2.0, step, 0.0), 6);
  } else {
    c.kstar_l2 = 2.0 * checked_integral(squared, 0.0, 2.0, "integral of K*^2");
  }
  c.r_K = 2.0 * c.kstar0 / c.kstar_l2;
  c.c_K = c.kstar0 * c.kstar0 / c.kstar_l2;
  return c;
}

}  // namespace

KernelConstants kernel_constants(const Kernel& kernel) {
  if (kernel.family() == KernelFamily::Tabulated) return compute_constants(kernel);
  static std::mutex mutex;
  static std::array<std::optional<KernelConstants>, 4> cache;
  const auto idx = static_cast<std::size_t>(kernel.family());
  std::lock_guard lock(mutex);
  if (!cache[idx]) cache[idx] = compute_constants(kernel);
  return *cache[idx];
}

}  // namespace selr
