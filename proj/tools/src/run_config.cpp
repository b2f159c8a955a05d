#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "selr/error.hpp"
#include "selr_cli/cli.hpp"

namespace selr::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void config_error(const std::string& message) {
  throw Error(ErrorCode::ConfigError, message);
}

std::vector<double> parse_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error("cannot parse '" + item + "' in " + what);
    }
  }
  return out;
}

}  // namespace

void RunConfig::validate() const {
  static const std::set<std::string> commands = {"test", "simulate", "calibrate", "bandwidth",
                                                 "kernel-constants"};
  if (!commands.count(command)) config_error("unknown command '" + command + "'");
  if (threads < 1) config_error("--threads must be at least 1");
  if (bootstrap < 0) config_error("--bootstrap must be nonnegative");
  if (h && !(*h > 0.0)) config_error("--h must be positive");
  for (double v : grid) {
    if (!(v > 0.0)) config_error("--grid values must be positive");
  }
  if (omega && !(omega->first < omega->second)) config_error("--omega needs lo < hi");

  const bool data_command = command == "test" || command == "calibrate" || command == "bandwidth";
  if (data_command && input.empty()) config_error("--input is required for " + command);
  if ((command == "test" || command == "calibrate") && !h) {
    config_error("--h is required for " + command);
  }
  if (command == "calibrate" && bootstrap < 1) {
    config_error("calibrate needs --bootstrap B with B >= 1");
  }
  const bool composite = null_spec == "composite";
  if (composite && fixed.empty()) config_error("--null composite requires --fixed indices");
  if (!composite && !fixed.empty()) config_error("--fixed is only valid with --null composite");
  if (!fixed_values.empty() && fixed_values.size() != fixed.size()) {
    config_error("--fixed-value needs one value per --fixed index");
  }
  if (include_full_term && null_spec.rfind("zero", 0) != 0 &&
      null_spec.rfind("constant", 0) != 0) {
    config_error("--include-full-term applies to simple nulls only");
  }
  if (no_estimated && null_spec != "gof") config_error("--no-estimated applies to --null gof");

  if (command == "simulate") {
    const int modes = int(table1) + int(table2) + int(power);
    if (modes != 1) config_error("simulate needs exactly one of --table1, --table2, --power");
    if (reps < 1) config_error("--reps must be at least 1");
    for (int n : n_list) {
      if (n < 10) config_error("--n values must be at least 10");
    }
    for (double c : c0_list) {
      if (!(c > 0.0)) config_error("--c0 values must be positive");
    }
    for (double c : c1_list) {
      if (!(c >= 0.0)) config_error("--c1 values must be nonnegative");
    }
    for (double r : r_grid) {
      if (!(r >= 0.0)) config_error("--r-grid values must be nonnegative");
    }
    if (alternative != "linear" && alternative != "sine") {
      config_error("--alternative must be linear or sine");
    }
  }
}

std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) config_error("cannot open config file '" + path + "'");
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || eq == 0) {
      config_error(path + ":" + std::to_string(line_no) + ": expected key=value");
    }
    std::string key = trim(line.substr(0, eq));
    if (key.rfind("--", 0) == 0) key.erase(0, 2);
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args,
                                      const std::vector<std::pair<std::string, std::string>>& entries) {
  std::set<std::string> given;
  for (const std::string& a : args) {
    if (a.rfind("--", 0) != 0) continue;
    given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  std::vector<std::string> out = args;
  for (const auto& [key, value] : entries) {
    if (given.count(key)) continue;
    out.push_back("--" + key + "=" + value);
  }
  return out;
}

HypothesisSpec build_hypothesis(const RunConfig& config, Eigen::Index p) {
  HypothesisSpec spec;
  const std::string& s = config.null_spec;
  if (config.omega) spec.omega = Interval{config.omega->first, config.omega->second};
  if (s == "zero") {
    spec.kind = HypothesisKind::SimpleNull;
  } else if (s.rfind("constant:", 0) == 0) {
    spec.kind = HypothesisKind::SimpleNull;
    for (double c : parse_numbers(s.substr(9), "--null constant")) {
      spec.a0.push_back(CoefficientFunction::constant(c));
    }
    if (static_cast<Eigen::Index>(spec.a0.size()) != p) {
      config_error("--null constant needs " + std::to_string(p) + " values");
    }
  } else if (s == "gof") {
    spec.kind = HypothesisKind::GoodnessOfFit;
    spec.no_estimated_coefficients = config.no_estimated;
  } else if (s == "composite") {
    spec.kind = HypothesisKind::CompositeNull;
    for (std::size_t k = 0; k < config.fixed.size(); ++k) {
      const int idx = config.fixed[k];
      if (idx < 1 || idx > p) {
        config_error("--fixed index " + std::to_string(idx) + " is outside 1.." + std::to_string(p));
      }
      spec.fixed_idx.push_back(idx - 1);
      const double v = config.fixed_values.empty() ? 0.0 : config.fixed_values[k];
      spec.a10.push_back(CoefficientFunction::constant(v));
    }
  } else if (s == "parametric:constant") {
    spec.kind = HypothesisKind::ParametricNull;
    spec.family = ParametricFamily::constant(static_cast<int>(p));
  } else if (s == "parametric:linear") {
    spec.kind = HypothesisKind::ParametricNull;
    spec.family = ParametricFamily::linear(static_cast<int>(p));
  } else {
    config_error("unknown null '" + s + "'");
  }
  spec.include_full_term = config.include_full_term;
  try {
    spec.validate(p);
  } catch (const Error& e) {
    config_error(e.what());
  }
  return spec;
}

}  // namespace selr::cli
