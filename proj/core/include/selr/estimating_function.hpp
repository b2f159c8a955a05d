#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace selr {

enum class EstimatingKind { Identity, SymmetricIndicator, SmoothedIndicator, Custom };

/// Map G from a residual to a k0-vector whose conditional mean is zero
/// under the model.
class EstimatingFunction {
 public:
  using Evaluator = std::function<void(double, std::span<double>)>;

  static EstimatingFunction identity();
  /// grid = (0, s_1, ..., s_k0), strictly increasing; the last point may be +inf.
  static EstimatingFunction symmetric_indicator(std::vector<double> grid);
  /// Same cells as symmetric_indicator with each edge replaced by a C1 cubic
  /// ramp of half-width `width`.
  static EstimatingFunction smoothed_indicator(std::vector<double> grid, double width);
  static EstimatingFunction custom(int k0, Evaluator eval, Evaluator derivative = {});

  int k0() const noexcept { return k0_; }
  EstimatingKind kind() const noexcept { return kind_; }
  const std::vector<double>& grid() const noexcept { return grid_; }
  double smoothing_width() const noexcept { return width_; }
  bool has_derivative() const noexcept;
  std::string describe() const;

  /// Writes G(eps) into out (size k0).
  void eval(double eps, std::span<double> out) const;
  /// Writes dG/d eps into out; throws DerivativeUnavailable for hard indicators.
  void eval_derivative(double eps, std::span<double> out) const;

 private:
  EstimatingFunction() = default;

  int k0_ = 1;
  EstimatingKind kind_ = EstimatingKind::Identity;
  std::vector<double> grid_;
  double width_ = 0.0;
  Evaluator custom_eval_;
  Evaluator custom_deriv_;
};

EstimatingFunction make_identity();
EstimatingFunction make_symmetric_indicator(std::vector<double> grid);
EstimatingFunction make_smoothed_indicator(std::vector<double> grid, double width);

Eigen::VectorXd eval_g(const EstimatingFunction& g, double eps);
Eigen::VectorXd eval_g_deriv(const EstimatingFunction& g, double eps);

/// Parses "identity", "symmetric:<s1,s2,...>" or "smoothed:<s1,...>:<width>".
/// The leading 0 of the grid is implicit. A bare "symmetric" takes its grid
/// from default_symmetric_grid(pilot_residuals).
EstimatingFunction parse_estimating_function(std::string_view spec,
                                             std::span<const double> pilot_residuals = {});

/// Grid (0, q_0.5, q_1.0) of |residuals|, used when a symmetric bank is
/// requested without explicit grid points.
std::vector<double> default_symmetric_grid(std::span<const double> residuals);

}  // namespace selr
