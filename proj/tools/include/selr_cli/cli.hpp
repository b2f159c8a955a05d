#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "selr/selr.hpp"

namespace selr::cli {

struct RunConfig {
  std::string command;
  std::string input;
  std::string output;

  // test / calibrate / bandwidth
  std::string null_spec = "zero";
  std::vector<int> fixed;              ///< 1-based covariate indices (composite)
  std::vector<double> fixed_values;    ///< constant null values for `fixed`
  std::string kernel = "triweight";
  std::string g = "identity";
  std::optional<double> h;
  std::vector<double> grid;
  int bootstrap = 0;
  std::string scheme = "gaussian";
  std::optional<std::uint64_t> seed;
  std::optional<std::pair<double, double>> omega;
  bool include_full_term = false;
  bool no_estimated = false;
  bool per_point = false;
  bool normal_pvalue = false;
  int threads = 1;

  // simulate
  bool table1 = false;
  bool table2 = false;
  bool power = false;
  std::vector<int> n_list;
  std::vector<double> c0_list;
  std::vector<double> c1_list;
  int reps = 500;
  std::string alternative = "linear";
  std::vector<double> r_grid;
  std::optional<double> threshold_selr;
  std::optional<double> threshold_f;
  std::string output_dir;

  /// Throws ConfigError on inconsistent settings.
  void validate() const;
};

/// key=value lines; '#' starts a comment. Throws ConfigError on malformed lines.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

/// Appends "--key=value" for every config entry whose key is not already
/// given on the command line, so explicit flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::pair<std::string, std::string>>& entries);

/// Hypothesis described by the null flags for a model with p covariates.
HypothesisSpec build_hypothesis(const RunConfig& config, Eigen::Index p);

/// Parses and runs one invocation. Returns the process exit status:
/// 0 ok, 2 configuration error, 3 data error, 4 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selr::cli
