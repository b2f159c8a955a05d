#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace selr {

enum class KernelFamily { Uniform, Epanechnikov, Biweight, Triweight, Tabulated };

/// Symmetric probability density supported on [-1, 1].
///
/// The polynomial families are normalized densities; the triweight is
/// (35/32)(1 - t^2)^3. Tabulated kernels are samples on a uniform grid
/// spanning [-1, 1], linearly interpolated and renormalized at load.
class Kernel {
 public:
  explicit Kernel(KernelFamily family = KernelFamily::Triweight);

  /// Builds a tabulated kernel from samples at equally spaced points with
  /// t.front() == -1 and t.back() == 1. Throws InvalidArgument if the table
  /// is not symmetric, has negative values, or does not integrate to a
  /// positive mass.
  static Kernel tabulated(std::span<const double> t, std::span<const double> values);

  KernelFamily family() const noexcept { return family_; }
  /// Node spacing of a tabulated kernel on [0, 1]; 0 for the polynomial families.
  double table_step() const noexcept;
  std::string name() const;

  double operator()(double t) const noexcept {
    const double a = t < 0 ? -t : t;
    if (a > 1.0) return 0.0;
    switch (family_) {
      case KernelFamily::Uniform:
        return 0.5;
      case KernelFamily::Epanechnikov:
        return 0.75 * (1.0 - t * t);
      case KernelFamily::Biweight: {
        const double q = 1.0 - t * t;
        return 0.9375 * q * q;
      }
      case KernelFamily::Triweight: {
        const double q = 1.0 - t * t;
        return 1.09375 * q * q * q;
      }
      case KernelFamily::Tabulated:
        return interpolate(a);
    }
    return 0.0;
  }

 private:
  double interpolate(double abs_t) const noexcept;

  KernelFamily family_;
  // Tabulated values on [-1, 1]; shared so Kernel copies stay cheap.
  std::shared_ptr<const std::vector<double>> table_;
};

double kernel_eval(const Kernel& kernel, double t);

/// Parses "uniform", "epanechnikov", "biweight", "triweight" or
/// "tabulated:<path>" (two-column text file).
Kernel parse_kernel(std::string_view spec);

Kernel load_tabulated_kernel(const std::string& path);

struct KernelConstants {
  double mu2 = 0.0;       ///< second moment of K
  double kstar0 = 0.0;    ///< K*(0)
  double kstar_l2 = 0.0;  ///< integral of K*(s)^2 over [-2, 2]
  double r_K = 0.0;       ///< 2 K*(0) / kstar_l2
  double c_K = 0.0;       ///< K*(0)^2 / kstar_l2
};

/// Integral of t^2 K(t) over [-1, 1].
double second_moment(const Kernel& kernel);

/// K*(s) = integral of K(t) K(s+t) (1 + t(s+t)/mu2) dt; zero for |s| > 2.
double kstar(const Kernel& kernel, double s);
double kstar(const Kernel& kernel, double s, double mu2);

KernelConstants kernel_constants(const Kernel& kernel);

}  // namespace selr
