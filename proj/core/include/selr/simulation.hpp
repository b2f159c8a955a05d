#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "selr/dataset.hpp"
#include "selr/kernel.hpp"
#include "selr/rng.hpp"

namespace selr::mc {

enum class AlternativeKind { Null, Linear, Sine };

/// a_1(u) under the simulation design: 0, r (u - 0.5) or r (2 sin^2(2 pi u) - 1).
struct Alternative {
  AlternativeKind kind = AlternativeKind::Null;
  double r = 0.0;

  double operator()(double u) const noexcept;
  std::string describe() const;
  /// "null", "linear:<r>" or "sine:<r>".
  static Alternative parse(const std::string& spec);
};

struct SimulationConfig {
  int n = 200;
  double c0 = 1.0;
  double c1 = 0.0;
  Alternative alternative;
  int reps = 500;
  std::uint64_t seed = 0;
  Kernel kernel = Kernel(KernelFamily::Triweight);
  /// Overrides c0 n^(-2/9) when set.
  std::optional<double> h;

  double bandwidth() const;
  /// Label of the variance function 1 + c1 u^2.
  std::string variance_label() const;
  /// Throws InvalidArgument on n < 10, reps < 1, c0 <= 0, c1 < 0 or r < 0.
  void validate() const;
};

/// U ~ Uniform[0,1], eps | U ~ N(0, 1 + c1 U^2), X = 1, Y = a_1(U) + eps.
Dataset generate(const SimulationConfig& config, CounterRng& rng);
/// Replicate `replicate` of `config`, drawn from the stream (seed, replicate).
Dataset generate(const SimulationConfig& config, std::uint64_t replicate);

/// (RSS0 - RSS1) / RSS1 with RSS0 = sum y^2 and RSS1 from a local linear fit.
double f_type_stat(const Dataset& data, const Kernel& kernel, double h);

/// Default simulation statistic: simple null A = 0, identity G, omega = [0, 1].
double selr_null_stat(const Dataset& data, const Kernel& kernel, double h, int threads = 1);

struct ReplicateStats {
  std::vector<double> selr;    ///< NaN where the replicate failed
  std::vector<double> f_type;  ///< NaN where the replicate failed
  int selr_failures = 0;
  int f_failures = 0;
};

/// Both statistics on every replicate of `config`.
ReplicateStats run_replicates(const SimulationConfig& config, int threads = 1,
                              bool with_f_type = true);

struct NullSummary {
  int n = 0;
  double h = 0.0;
  std::string variance_label;
  double mu = 0.0;
  double sigma = 0.0;
  int reps = 0;
  int failures = 0;
};

/// Mean and standard deviation (n - 1 divisor, 0 for one value) of the finite
/// entries, with compensated summation.
NullSummary summarize(const std::vector<double>& sample);

std::vector<NullSummary> null_table(const std::vector<SimulationConfig>& configs,
                                    int threads = 1);

struct MomentMatch {
  double r0 = 0.0;
  double d0 = 0.0;
};

/// r0 = 2 mu / sigma^2, d0 = 2 mu^2 / sigma^2 from sample moments.
MomentMatch moment_match(const std::vector<double>& sample);
MomentMatch moment_match(double mu, double sigma);

/// sup |ECDF(r0 x) - G(x)| with G the gamma(d0 / 2, scale 2) CDF.
double ecdf_vs_chisq(const std::vector<double>& sample, const MomentMatch& match);

/// Empirical upper quantile (type 7) of the finite entries.
double upper_quantile(const std::vector<double>& sample, double level);

struct Thresholds {
  std::optional<double> selr;
  std::optional<double> f_type;
};

struct PowerRow {
  int n = 0;
  double h = 0.0;
  double c1 = 0.0;
  std::string variance_label;
  double r = 0.0;
  int reps = 0;
  std::optional<double> rate_selr;  ///< at the supplied threshold
  std::optional<double> rate_f;
  double rate_selr_calibrated = 0.0;  ///< at the 95% quantile of the null run
  double rate_f_calibrated = 0.0;
  double threshold_selr_calibrated = 0.0;
  double threshold_f_calibrated = 0.0;
};

/// Rejection rates for every config and r. Each config's alternative kind is
/// used with its r replaced by the grid values; the null run (r = 0) of the
/// same config provides the self-calibrated thresholds at `level`.
std::vector<PowerRow> size_power_study(const std::vector<SimulationConfig>& configs,
                                       const Thresholds& thresholds,
                                       const std::vector<double>& r_grid, int threads = 1,
                                       double level = 0.05);

void write_null_table_csv(std::ostream& out, const std::vector<NullSummary>& rows);
void write_power_csv(std::ostream& out, const std::vector<PowerRow>& rows);
/// Whitespace-separated columns (r, power_selr, power_f), one block per
/// variance function, each preceded by a comment header naming the series.
void write_plot_data(std::ostream& out, const std::vector<PowerRow>& rows);
/// JSON manifest of the configs and seed.
std::string study_manifest(const std::string& study, const std::vector<SimulationConfig>& configs);

}  // namespace selr::mc
