#include "selr/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include "json.hpp"

#include "selr/error.hpp"
#include "selr/local_el.hpp"
#include "selr/parallel.hpp"
#include "selr/selr.hpp"

namespace selr::mc {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Neumaier summation.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::vector<double> finite_values(const std::vector<double>& sample) {
  std::vector<double> out;
  out.reserve(sample.size());
  for (double x : sample) {
    if (std::isfinite(x)) out.push_back(x);
  }
  return out;
}

std::string format_number(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

double Alternative::operator()(double u) const noexcept {
  switch (kind) {
    case AlternativeKind::Null:
      return 0.0;
    case AlternativeKind::Linear:
      return r * (u - 0.5);
    case AlternativeKind::Sine: {
      const double s = std::sin(2.0 * std::numbers::pi * u);
      return r * (2.0 * s * s - 1.0);
    }
  }
  return 0.0;
}

std::string Alternative::describe() const {
  switch (kind) {
    case AlternativeKind::Null: return "null";
    case AlternativeKind::Linear: return "linear:" + format_number(r);
    case AlternativeKind::Sine: return "sine:" + format_number(r);
  }
  return "null";
}

Alternative Alternative::parse(const std::string& spec) {
  if (spec == "null") return {};
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  Alternative out;
  if (head == "linear") {
    out.kind = AlternativeKind::Linear;
  } else if (head == "sine") {
    out.kind = AlternativeKind::Sine;
  } else {
    throw Error(ErrorCode::ConfigError, "unknown alternative '" + spec + "'");
  }
  if (colon == std::string::npos) {
    throw Error(ErrorCode::ConfigError, "alternative '" + spec + "' needs a level r");
  }
  try {
    std::size_t used = 0;
    out.r = std::stod(spec.substr(colon + 1), &used);
    if (used != spec.size() - colon - 1) throw std::invalid_argument("trailing");
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "bad alternative level in '" + spec + "'");
  }
  return out;
}

double SimulationConfig::bandwidth() const {
  if (h) return *h;
  return c0 * std::pow(static_cast<double>(n), -2.0 / 9.0);
}

std::string SimulationConfig::variance_label() const {
  if (c1 == 0.0) return "1";
  if (c1 == 1.0) return "1+u^2";
  return "1+" + format_number(c1) + "u^2";
}

void SimulationConfig::validate() const {
  if (n < 10) throw Error(ErrorCode::InvalidArgument, "simulation needs n >= 10");
  if (reps < 1) throw Error(ErrorCode::InvalidArgument, "simulation needs reps >= 1");
  if (!(c0 > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation needs c0 > 0");
  if (!(c1 >= 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation needs c1 >= 0");
  if (!(alternative.r >= 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation needs r >= 0");
  if (h && !(*h > 0.0)) throw Error(ErrorCode::InvalidArgument, "simulation needs h > 0");
}

Dataset generate(const SimulationConfig& config, CounterRng& rng) {
  config.validate();
  const Eigen::Index n = config.n;
  Eigen::VectorXd u(n), y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    u[i] = rng.uniform();
    const double sd = std::sqrt(1.0 + config.c1 * u[i] * u[i]);
    y[i] = config.alternative(u[i]) + sd * rng.normal();
  }
  return Dataset::intercept_only(std::move(u), std::move(y));
}

Dataset generate(const SimulationConfig& config, std::uint64_t replicate) {
  CounterRng rng(config.seed, replicate);
  return generate(config, rng);
}

double f_type_stat(const Dataset& data, const Kernel& kernel, double h) {
  data.validate();
  double rss0 = 0.0;
  double rss1 = 0.0;
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const LocalParameter beta = lls_init(data, kernel, h, data.u[i]);
    const double resid = data.y[i] - data.x.row(i).dot(beta.a);
    rss0 += data.y[i] * data.y[i];
    rss1 += resid * resid;
  }
  if (rss0 == 0.0 && rss1 == 0.0) return 0.0;
  if (rss1 < 1e-12 * rss0) {
    throw Error(ErrorCode::DegenerateRSS1, "local linear fit interpolates the data");
  }
  return (rss0 - rss1) / rss1;
}

double selr_null_stat(const Dataset& data, const Kernel& kernel, double h, int threads) {
  HypothesisSpec spec;
  spec.kind = HypothesisKind::SimpleNull;
  spec.omega = Interval{0.0, 1.0};
  SelrOptions options;
  options.threads = threads;
  return selr_simple(data, kernel, h, make_identity(), spec, options).statistic;
}

ReplicateStats run_replicates(const SimulationConfig& config, int threads, bool with_f_type) {
  config.validate();
  const double h = config.bandwidth();
  const auto reps = static_cast<std::size_t>(config.reps);
  ReplicateStats out;
  out.selr.assign(reps, kNaN);
  out.f_type.assign(reps, kNaN);
  parallel_for(reps, threads, [&](std::size_t r) {
    const Dataset data = generate(config, static_cast<std::uint64_t>(r));
    try {
      out.selr[r] = selr_null_stat(data, config.kernel, h);
    } catch (const Error&) {
    }
    if (with_f_type) {
      try {
        out.f_type[r] = f_type_stat(data, config.kernel, h);
      } catch (const Error&) {
      }
    }
  });
  for (std::size_t r = 0; r < reps; ++r) {
    if (!std::isfinite(out.selr[r])) ++out.selr_failures;
    if (with_f_type && !std::isfinite(out.f_type[r])) ++out.f_failures;
  }
  return out;
}

NullSummary summarize(const std::vector<double>& sample) {
  const std::vector<double> xs = finite_values(sample);
  NullSummary out;
  out.reps = static_cast<int>(xs.size());
  out.failures = static_cast<int>(sample.size() - xs.size());
  if (xs.empty()) {
    out.mu = kNaN;
    out.sigma = kNaN;
    return out;
  }
  CompensatedSum sum;
  for (double x : xs) sum.add(x);
  out.mu = sum.value() / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  CompensatedSum sq;
  for (double x : xs) sq.add((x - out.mu) * (x - out.mu));
  out.sigma = std::sqrt(sq.value() / static_cast<double>(xs.size() - 1));
  return out;
}

std::vector<NullSummary> null_table(const std::vector<SimulationConfig>& configs, int threads) {
  std::vector<NullSummary> rows;
  for (const SimulationConfig& config : configs) {
    if (config.alternative.kind != AlternativeKind::Null && config.alternative.r != 0.0) {
      throw Error(ErrorCode::InvalidArgument, "null table configs must use the null model");
    }
    const ReplicateStats stats = run_replicates(config, threads, false);
    NullSummary row = summarize(stats.selr);
    row.n = config.n;
    row.h = config.bandwidth();
    row.variance_label = config.variance_label();
    rows.push_back(row);
  }
  return rows;
}

MomentMatch moment_match(double mu, double sigma) {
  const double var = sigma * sigma;
  if (!(var > 0.0) || !std::isfinite(var)) {
    throw Error(ErrorCode::ZeroVariance, "moment matching needs a positive variance");
  }
  if (!(mu > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "moment matching needs a positive mean");
  }
  return {2.0 * mu / var, 2.0 * mu * mu / var};
}

MomentMatch moment_match(const std::vector<double>& sample) {
  const std::vector<double> xs = finite_values(sample);
  if (xs.size() < 2) {
    throw Error(ErrorCode::InvalidArgument, "moment matching needs at least two values");
  }
  const NullSummary s = summarize(xs);
  return moment_match(s.mu, s.sigma);
}

double ecdf_vs_chisq(const std::vector<double>& sample, const MomentMatch& match) {
  std::vector<double> xs = finite_values(sample);
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  if (!(match.r0 > 0.0) || !(match.d0 > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "moment match parameters must be positive");
  }
  for (double& x : xs) x *= match.r0;
  std::sort(xs.begin(), xs.end());
  const double m = static_cast<double>(xs.size());
  double ks = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = xs[i] > 0.0 ? boost::math::gamma_p(match.d0 / 2.0, xs[i] / 2.0) : 0.0;
    ks = std::max(ks, std::max(std::abs(static_cast<double>(i + 1) / m - f),
                               std::abs(f - static_cast<double>(i) / m)));
  }
  return ks;
}

double upper_quantile(const std::vector<double>& sample, double level) {
  std::vector<double> xs = finite_values(sample);
  if (xs.empty()) throw Error(ErrorCode::InvalidArgument, "empty sample");
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::InvalidArgument, "quantile level must lie in (0, 1)");
  }
  std::sort(xs.begin(), xs.end());
  const double pos = (1.0 - level) * static_cast<double>(xs.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, xs.size() - 1);
  return xs[lo] + (pos - static_cast<double>(lo)) * (xs[hi] - xs[lo]);
}

namespace {

double rejection_rate(const std::vector<double>& stats, double threshold) {
  int hits = 0;
  int total = 0;
  for (double s : stats) {
    if (!std::isfinite(s)) continue;
    ++total;
    if (s > threshold) ++hits;
  }
  return total > 0 ? static_cast<double>(hits) / total : kNaN;
}

}  // namespace

std::vector<PowerRow> size_power_study(const std::vector<SimulationConfig>& configs,
                                       const Thresholds& thresholds,
                                       const std::vector<double>& r_grid, int threads,
                                       double level) {
  if (r_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty r grid");
  std::vector<PowerRow> rows;
  for (const SimulationConfig& base : configs) {
    SimulationConfig null_config = base;
    null_config.alternative.r = 0.0;
    const ReplicateStats null_stats = run_replicates(null_config, threads);
    const double cal_selr = upper_quantile(null_stats.selr, level);
    const double cal_f = upper_quantile(null_stats.f_type, level);
    for (double r : r_grid) {
      SimulationConfig config = base;
      config.alternative.r = r;
      if (config.alternative.kind == AlternativeKind::Null && r != 0.0) {
        config.alternative.kind = AlternativeKind::Linear;
      }
      const ReplicateStats stats = r == 0.0 ? null_stats : run_replicates(config, threads);
      PowerRow row;
      row.n = config.n;
      row.h = config.bandwidth();
      row.c1 = config.c1;
      row.variance_label = config.variance_label();
      row.r = r;
      row.reps = config.reps;
      if (thresholds.selr) row.rate_selr = rejection_rate(stats.selr, *thresholds.selr);
      if (thresholds.f_type) row.rate_f = rejection_rate(stats.f_type, *thresholds.f_type);
      row.threshold_selr_calibrated = cal_selr;
      row.threshold_f_calibrated = cal_f;
      row.rate_selr_calibrated = rejection_rate(stats.selr, cal_selr);
      row.rate_f_calibrated = rejection_rate(stats.f_type, cal_f);
      rows.push_back(row);
    }
  }
  return rows;
}

namespace {

std::string csv_optional(const std::optional<double>& v) {
  return v ? format_number(*v) : std::string();
}

}  // namespace

void write_null_table_csv(std::ostream& out, const std::vector<NullSummary>& rows) {
  out << "n,h,variance,mu,sigma,reps,failures\n";
  for (const NullSummary& r : rows) {
    out << r.n << ',' << format_number(r.h) << ',' << r.variance_label << ','
        << format_number(r.mu) << ',' << format_number(r.sigma) << ',' << r.reps << ','
        << r.failures << '\n';
  }
}

void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows) {
  out << "n,h,variance,r,reps,rate_selr,rate_f,rate_selr_calibrated,rate_f_calibrated,"
         "threshold_selr_calibrated,threshold_f_calibrated\n";
  for (const PowerRow& r : rows) {
    out << r.n << ',' << format_number(r.h) << ',' << r.variance_label << ','
        << format_number(r.r) << ',' << r.reps << ',' << csv_optional(r.rate_selr) << ','
        << csv_optional(r.rate_f) << ',' << format_number(r.rate_selr_calibrated) << ','
        << format_number(r.rate_f_calibrated) << ',' << format_number(r.threshold_selr_calibrated)
        << ',' << format_number(r.threshold_f_calibrated) << '\n';
  }
}

void write_plot_data(std::ostream& out, const std::vector<PowerRow>& rows) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const PowerRow*>> series;
  for (const PowerRow& r : rows) {
    const std::string key = "n=" + std::to_string(r.n) + " variance=" + r.variance_label;
    if (!series.count(key)) order.push_back(key);
    series[key].push_back(&r);
  }
  bool first = true;
  for (const std::string& key : order) {
    if (!first) out << "\n\n";
    first = false;
    out << "# series: " << key << "\n# r power_selr power_f\n";
    for (const PowerRow* r : series[key]) {
      out << format_number(r->r) << ' ' << format_number(r->rate_selr_calibrated) << ' '
          << format_number(r->rate_f_calibrated) << '\n';
    }
  }
}

std::string study_manifest(const std::string& study, const std::vector<SimulationConfig>& configs) {
  nlohmann::ordered_json doc;
  doc["study"] = study;
  doc["configs"] = nlohmann::ordered_json::array();
  for (const SimulationConfig& c : configs) {
    nlohmann::ordered_json j;
    j["n"] = c.n;
    j["c0"] = c.c0;
    j["c1"] = c.c1;
    j["h"] = c.bandwidth();
    j["alternative"] = c.alternative.describe();
    j["reps"] = c.reps;
    j["seed"] = c.seed;
    j["kernel"] = c.kernel.name();
    doc["configs"].push_back(j);
  }
  return doc.dump(2);
}

}  // namespace selr::mc
