#include "selr/estimating_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "selr/error.hpp"

namespace selr {
namespace {

// Cubic smoothstep ramp from 0 at x <= -1 to 1 at x >= 1.
inline double ramp(double x) {
  if (x <= -1.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double v = 0.5 * (x + 1.0);
  return v * v * (3.0 - 2.0 * v);
}

inline double ramp_deriv(double x) {
  if (x <= -1.0 || x >= 1.0) return 0.0;
  const double v = 0.5 * (x + 1.0);
  return 3.0 * v * (1.0 - v);  // d/dx of 3v^2 - 2v^3 with dv/dx = 1/2
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.size() < 2) {
    throw Error(ErrorCode::InvalidGrid, "indicator grid needs at least two points");
  }
  if (grid.front() != 0.0) {
    throw Error(ErrorCode::InvalidGrid, "indicator grid must start at 0");
  }
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (!(grid[k] > grid[k - 1]) || std::isnan(grid[k])) {
      throw Error(ErrorCode::InvalidGrid, "indicator grid must be strictly increasing");
    }
    if (std::isinf(grid[k]) && k + 1 != grid.size()) {
      throw Error(ErrorCode::InvalidGrid, "only the last grid point may be infinite");
    }
  }
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in{std::string(text)};
  while (std::getline(in, item, ',')) {
    if (item == "inf" || item == "Inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ConfigError, "bad grid value '" + item + "'");
    }
  }
  return out;
}

}  // namespace

EstimatingFunction EstimatingFunction::identity() {
  EstimatingFunction g;
  g.k0_ = 1;
  g.kind_ = EstimatingKind::Identity;
  return g;
}

EstimatingFunction EstimatingFunction::symmetric_indicator(std::vector<double> grid) {
  validate_grid(grid);
  EstimatingFunction g;
  g.k0_ = static_cast<int>(grid.size()) - 1;
  g.kind_ = EstimatingKind::SymmetricIndicator;
  g.grid_ = std::move(grid);
  return g;
}

EstimatingFunction EstimatingFunction::smoothed_indicator(std::vector<double> grid,
                                                          double width) {
  validate_grid(grid);
  if (!(width > 0.0) || !std::isfinite(width)) {
    throw Error(ErrorCode::InvalidArgument, "smoothing width must be positive");
  }
  double smallest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < grid.size(); ++k) {
    smallest = std::min(smallest, grid[k] - grid[k - 1]);
  }
  if (width > smallest) {
    throw Error(ErrorCode::InvalidArgument,
                "smoothing width exceeds the smallest grid cell");
  }
  EstimatingFunction g;
  g.k0_ = static_cast<int>(grid.size()) - 1;
  g.kind_ = EstimatingKind::SmoothedIndicator;
  g.grid_ = std::move(grid);
  g.width_ = width;
  return g;
}

EstimatingFunction EstimatingFunction::custom(int k0, Evaluator eval, Evaluator derivative) {
  if (k0 < 1 || !eval) {
    throw Error(ErrorCode::InvalidArgument, "custom estimating function needs k0 >= 1");
  }
  EstimatingFunction g;
  g.k0_ = k0;
  g.kind_ = EstimatingKind::Custom;
  g.custom_eval_ = std::move(eval);
  g.custom_deriv_ = std::move(derivative);
  return g;
}

bool EstimatingFunction::has_derivative() const noexcept {
  switch (kind_) {
    case EstimatingKind::Identity:
    case EstimatingKind::SmoothedIndicator:
      return true;
    case EstimatingKind::SymmetricIndicator:
      return false;
    case EstimatingKind::Custom:
      return static_cast<bool>(custom_deriv_);
  }
  return false;
}

std::string EstimatingFunction::describe() const {
  std::ostringstream os;
  os.precision(17);
  auto grid_text = [&] {
    for (std::size_t k = 1; k < grid_.size(); ++k) {
      if (k > 1) os << ',';
      if (std::isinf(grid_[k])) os << "inf"; else os << grid_[k];
    }
  };
  switch (kind_) {
    case EstimatingKind::Identity: os << "identity"; break;
    case EstimatingKind::SymmetricIndicator: os << "symmetric:"; grid_text(); break;
    case EstimatingKind::SmoothedIndicator:
      os << "smoothed:";
      grid_text();
      os << ':' << width_;
      break;
    case EstimatingKind::Custom: os << "custom(k0=" << k0_ << ")"; break;
  }
  return os.str();
}

void EstimatingFunction::eval(double eps, std::span<double> out) const {
  switch (kind_) {
    case EstimatingKind::Identity:
      out[0] = eps;
      return;
    case EstimatingKind::SymmetricIndicator:
      for (int k = 0; k < k0_; ++k) {
        const double lo = grid_[k], hi = grid_[k + 1];
        const double pos = (eps >= lo && eps <= hi) ? 1.0 : 0.0;
        const double neg = (-eps >= lo && -eps <= hi) ? 1.0 : 0.0;
        out[k] = pos - neg;
      }
      return;
    case EstimatingKind::SmoothedIndicator:
      for (int k = 0; k < k0_; ++k) {
        const double lo = grid_[k], hi = grid_[k + 1];
        auto cell = [&](double e) {
          return ramp((e - lo) / width_) - ramp((e - hi) / width_);
        };
        out[k] = cell(eps) - cell(-eps);
      }
      return;
    case EstimatingKind::Custom:
      custom_eval_(eps, out);
      return;
  }
}

void EstimatingFunction::eval_derivative(double eps, std::span<double> out) const {
  switch (kind_) {
    case EstimatingKind::Identity:
      out[0] = 1.0;
      return;
    case EstimatingKind::SymmetricIndicator:
      throw Error(ErrorCode::DerivativeUnavailable,
                  "hard indicator estimating functions have no derivative");
    case EstimatingKind::SmoothedIndicator:
      for (int k = 0; k < k0_; ++k) {
        const double lo = grid_[k], hi = grid_[k + 1];
        auto cell_d = [&](double e) {
          return (ramp_deriv((e - lo) / width_) - ramp_deriv((e - hi) / width_)) / width_;
        };
        // d/de [cell(e) - cell(-e)] = cell'(e) + cell'(-e)
        out[k] = cell_d(eps) + cell_d(-eps);
      }
      return;
    case EstimatingKind::Custom:
      if (!custom_deriv_) {
        throw Error(ErrorCode::DerivativeUnavailable,
                    "custom estimating function has no derivative");
      }
      custom_deriv_(eps, out);
      return;
  }
}

EstimatingFunction make_identity() { return EstimatingFunction::identity(); }

EstimatingFunction make_symmetric_indicator(std::vector<double> grid) {
  return EstimatingFunction::symmetric_indicator(std::move(grid));
}

EstimatingFunction make_smoothed_indicator(std::vector<double> grid, double width) {
  return EstimatingFunction::smoothed_indicator(std::move(grid), width);
}

Eigen::VectorXd eval_g(const EstimatingFunction& g, double eps) {
  Eigen::VectorXd out(g.k0());
  g.eval(eps, std::span<double>(out.data(), out.size()));
  return out;
}

Eigen::VectorXd eval_g_deriv(const EstimatingFunction& g, double eps) {
  Eigen::VectorXd out(g.k0());
  g.eval_derivative(eps, std::span<double>(out.data(), out.size()));
  return out;
}

std::vector<double> default_symmetric_grid(std::span<const double> residuals) {
  if (residuals.empty()) {
    throw Error(ErrorCode::InvalidArgument, "no residuals for the default grid");
  }
  std::vector<double> a(residuals.size());
  std::transform(residuals.begin(), residuals.end(), a.begin(),
                 [](double r) { return std::abs(r); });
  std::sort(a.begin(), a.end());
  // Type-7 quantile at level 0.5; level 1.0 is the maximum.
  const double pos = 0.5 * static_cast<double>(a.size() - 1);
  const auto lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, a.size() - 1);
  const double median = a[lo] + (pos - static_cast<double>(lo)) * (a[hi] - a[lo]);
  const double top = a.back();
  if (!(median > 0.0) || !(top > median)) {
    throw Error(ErrorCode::InvalidGrid,
                "residuals too degenerate to build a default indicator grid");
  }
  return {0.0, median, top};
}

EstimatingFunction parse_estimating_function(std::string_view spec,
                                             std::span<const double> pilot_residuals) {
  if (spec == "identity") return make_identity();
  if (spec == "symmetric") {
    if (pilot_residuals.empty()) {
      throw Error(ErrorCode::ConfigError,
                  "symmetric estimating function without a grid needs pilot residuals");
    }
    return make_symmetric_indicator(default_symmetric_grid(pilot_residuals));
  }
  auto with_zero = [](std::vector<double> pts) {
    pts.insert(pts.begin(), 0.0);
    return pts;
  };
  if (spec.starts_with("symmetric:")) {
    return make_symmetric_indicator(with_zero(parse_list(spec.substr(10))));
  }
  if (spec.starts_with("smoothed:")) {
    const auto rest = spec.substr(9);
    const auto colon = rest.rfind(':');
    if (colon == std::string_view::npos) {
      throw Error(ErrorCode::ConfigError, "smoothed estimating function needs :<width>");
    }
    const auto width = parse_list(rest.substr(colon + 1));
    if (width.size() != 1) {
      throw Error(ErrorCode::ConfigError, "smoothed estimating function needs one width");
    }
    return make_smoothed_indicator(with_zero(parse_list(rest.substr(0, colon))), width[0]);
  }
  throw Error(ErrorCode::ConfigError, "unknown estimating function '" + std::string(spec) + "'");
}

}  // namespace selr
