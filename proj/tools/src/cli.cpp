#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "selr/csv_io.hpp"
#include "selr/error.hpp"
#include "selr/local_el.hpp"
#include "selr/report.hpp"
#include "selr/simulation.hpp"
#include "selr_cli/cli.hpp"

namespace selr::cli {
namespace {

std::optional<std::string> find_config_path(const std::vector<std::string>& args) {
  for (std::size_t k = 0; k < args.size(); ++k) {
    if (args[k] == "--config" && k + 1 < args.size()) return args[k + 1];
    if (args[k].rfind("--config=", 0) == 0) return args[k].substr(9);
  }
  return std::nullopt;
}

void add_data_options(CLI::App* sub, RunConfig& cfg, std::string& omega_text,
                      std::uint64_t& seed_value) {
  sub->add_option("--input,-i", cfg.input, "CSV with columns u, x1..xp, y");
  sub->add_option("--output,-o", cfg.output, "report path (default: stdout)");
  sub->add_option("--kernel", cfg.kernel, "uniform|epanechnikov|biweight|triweight|tabulated:<path>");
  sub->add_option("--g", cfg.g, "identity | symmetric[:s1,..] | smoothed:s1,..:width");
  sub->add_option("--null", cfg.null_spec,
                  "zero | constant:c1,.. | gof | composite | parametric:constant|linear");
  sub->add_option("--fixed", cfg.fixed, "1-based covariate indices pinned by a composite null")
      ->delimiter(',');
  sub->add_option("--fixed-value", cfg.fixed_values, "constant null values for --fixed")
      ->delimiter(',');
  sub->add_option("--bootstrap,-B", cfg.bootstrap, "bootstrap replicates");
  sub->add_option("--scheme", cfg.scheme, "gaussian | wild | resample");
  sub->add_option("--seed", seed_value, "random seed (drawn and printed when absent)");
  sub->add_option("--omega", omega_text, "test interval lo,hi (default: range of u)");
  sub->add_flag("--include-full-term", cfg.include_full_term,
                "simple null with k0 = 1: include the full-model term");
  sub->add_flag("--no-estimated", cfg.no_estimated,
                "goodness of fit with no estimated coefficients");
  sub->add_flag("--per-point", cfg.per_point, "include per-point diagnostics in the report");
  sub->add_flag("--normal-pvalue", cfg.normal_pvalue, "normal approximation for the p-value");
  sub->add_option("--threads", cfg.threads, "worker threads");
  sub->add_option("--config", "key=value configuration file (flags win)");
}

std::pair<double, double> parse_omega(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw Error(ErrorCode::ConfigError, "--omega expects lo,hi");
  try {
    return {std::stod(text.substr(0, comma)), std::stod(text.substr(comma + 1))};
  } catch (const std::exception&) {
    throw Error(ErrorCode::ConfigError, "cannot parse --omega '" + text + "'");
  }
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  file << text;
}

void emit_metadata(const std::string& command, const std::string& path) {
  if (path.empty()) return;
  std::ofstream file(path + ".meta.json");
  if (file) file << metadata_json(command);
}

std::vector<double> pilot_residuals(const Dataset& data, const Kernel& kernel, double h) {
  std::vector<double> out(static_cast<std::size_t>(data.n()));
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    const LocalParameter beta = lls_init(data, kernel, h, data.u[i]);
    out[static_cast<std::size_t>(i)] = data.y[i] - data.x.row(i).dot(beta.a);
  }
  return out;
}

EstimatingFunction make_g(const RunConfig& cfg, const Dataset& data, const Kernel& kernel,
                          double h) {
  if (cfg.g == "symmetric") {
    const std::vector<double> r = pilot_residuals(data, kernel, h);
    return parse_estimating_function(cfg.g, r);
  }
  return parse_estimating_function(cfg.g);
}

ReportContext context_for(const RunConfig& cfg, const Kernel& kernel,
                          const EstimatingFunction& g) {
  ReportContext ctx;
  ctx.kernel = kernel.name();
  ctx.estimating_function = g.describe();
  ctx.null_description = cfg.null_spec;
  ctx.bootstrap_scheme = cfg.scheme;
  if (cfg.seed) {
    ctx.seed = *cfg.seed;
    ctx.has_seed = true;
  }
  return ctx;
}

SelrOptions options_for(const RunConfig& cfg) {
  SelrOptions opt;
  opt.threads = cfg.threads;
  opt.per_point = cfg.per_point;
  opt.pvalue = cfg.normal_pvalue ? PValueMethod::Normal : PValueMethod::Gamma;
  return opt;
}

int run_test(const RunConfig& cfg, std::ostream& out, bool calibrate) {
  const Dataset data = ingest_csv(cfg.input);
  const Kernel kernel = parse_kernel(cfg.kernel);
  const double h = *cfg.h;
  const EstimatingFunction g = make_g(cfg, data, kernel, h);
  const HypothesisSpec spec = build_hypothesis(cfg, data.p());
  const SelrOptions opt = options_for(cfg);
  TestResult result = selr_test(data, kernel, h, g, spec, opt);
  std::vector<double> replicates;
  if (cfg.bootstrap > 0) {
    const BootstrapResult boot = bootstrap_null(data, kernel, h, g, spec, cfg.bootstrap,
                                                parse_bootstrap_scheme(cfg.scheme), *cfg.seed, opt);
    result.p_bootstrap = boot.p_value;
    result.bootstrap_reps = static_cast<int>(boot.replicates.size());
    result.warnings.insert(result.warnings.end(), boot.warnings.begin(), boot.warnings.end());
    replicates = boot.replicates;
  }
  emit(report_json(result, context_for(cfg, kernel, g)), cfg.output, out);
  emit_metadata(cfg.command, cfg.output);
  if (calibrate && !cfg.output.empty()) {
    std::ofstream rep(cfg.output + ".replicates.csv");
    rep << "replicate_statistic\n" << std::setprecision(17);
    for (double r : replicates) rep << r << '\n';
  }
  return 0;
}

int run_bandwidth(const RunConfig& cfg, std::ostream& out) {
  const Dataset data = ingest_csv(cfg.input);
  const Kernel kernel = parse_kernel(cfg.kernel);
  std::vector<double> grid = cfg.grid;
  if (grid.empty()) {
    grid = default_bandwidth_grid(data.n(), data.u.maxCoeff() - data.u.minCoeff());
  }
  const double pilot_h = cfg.h ? *cfg.h : grid[grid.size() / 2];
  const EstimatingFunction g = make_g(cfg, data, kernel, pilot_h);
  const HypothesisSpec spec = build_hypothesis(cfg, data.p());
  const BandwidthSelection sel =
      select_bandwidth(data, kernel, g, spec, grid, cfg.bootstrap,
                       parse_bootstrap_scheme(cfg.scheme), cfg.seed.value_or(0), options_for(cfg));
  emit(bandwidth_report_json(sel, context_for(cfg, kernel, g)), cfg.output, out);
  emit_metadata(cfg.command, cfg.output);
  return 0;
}

int run_kernel_constants(const RunConfig& cfg, std::ostream& out) {
  const Kernel kernel = parse_kernel(cfg.kernel);
  const KernelConstants kc = kernel_constants(kernel);
  std::ostringstream os;
  os << std::setprecision(10);
  os << "kernel " << kernel.name() << '\n'
     << "mu2 " << kc.mu2 << '\n'
     << "kstar0 " << kc.kstar0 << '\n'
     << "kstar_l2 " << kc.kstar_l2 << '\n'
     << "r_K " << kc.r_K << '\n'
     << "c_K " << kc.c_K << '\n';
  emit(os.str(), cfg.output, out);
  return 0;
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
  const std::vector<int> ns = cfg.n_list.empty() ? std::vector<int>{200} : cfg.n_list;
  const std::vector<double> c0s = cfg.c0_list.empty() ? std::vector<double>{1.0} : cfg.c0_list;
  std::vector<double> c1s = cfg.c1_list;
  if (c1s.empty()) {
    c1s = cfg.table1 ? std::vector<double>{0.0} : std::vector<double>{0.0, 1.0, 10.0, 100.0};
  }
  const Kernel kernel = parse_kernel(cfg.kernel);
  std::vector<mc::SimulationConfig> configs;
  for (int n : ns) {
    for (double c0 : c0s) {
      for (double c1 : c1s) {
        mc::SimulationConfig c;
        c.n = n;
        c.c0 = c0;
        c.c1 = c1;
        c.reps = cfg.reps;
        c.seed = *cfg.seed;
        c.kernel = kernel;
        if (cfg.h) c.h = cfg.h;
        if (cfg.power) {
          c.alternative.kind =
              cfg.alternative == "sine" ? mc::AlternativeKind::Sine : mc::AlternativeKind::Linear;
        }
        configs.push_back(c);
      }
    }
  }
  const std::string study = cfg.table1 ? "table1" : (cfg.table2 ? "table2" : "power");
  std::ostringstream csv;
  std::ostringstream plot;
  if (cfg.table1) {
    mc::write_null_table_csv(csv, mc::null_table(configs, cfg.threads));
  } else {
    mc::Thresholds thr{cfg.threshold_selr, cfg.threshold_f};
    std::vector<double> r_grid = cfg.r_grid;
    if (r_grid.empty()) {
      r_grid = cfg.table2 ? std::vector<double>{0.0} : std::vector<double>{0.0, 0.4, 0.8, 1.2};
    }
    const auto rows = mc::size_power_study(configs, thr, r_grid, cfg.threads);
    mc::write_power_csv(csv, rows);
    if (cfg.power) mc::write_plot_data(plot, rows);
  }
  if (cfg.output_dir.empty()) {
    emit(csv.str(), cfg.output, out);
    return 0;
  }
  std::filesystem::create_directories(cfg.output_dir);
  const std::filesystem::path dir(cfg.output_dir);
  emit(csv.str(), (dir / (study + ".csv")).string(), out);
  if (cfg.power) emit(plot.str(), (dir / "power_plot.dat").string(), out);
  emit(mc::study_manifest(study, configs) + "\n", (dir / "manifest.json").string(), out);
  emit_metadata(cfg.command, (dir / "manifest.json").string());
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args_in, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  std::string omega_text;
  std::uint64_t seed_value = 0;
  CLI::App app{"Sieve empirical likelihood ratio tests for varying-coefficient models", "selr"};
  app.set_help_flag("--help", "print help");
  app.require_subcommand(1);

  CLI::App* test = app.add_subcommand("test", "run a test on a CSV dataset");
  CLI::App* calibrate =
      app.add_subcommand("calibrate", "bootstrap null distribution of the statistic");
  CLI::App* bandwidth = app.add_subcommand("bandwidth", "multiscale bandwidth selection");
  CLI::App* simulate = app.add_subcommand("simulate", "simulation studies");
  CLI::App* constants = app.add_subcommand("kernel-constants", "print kernel constants");

  for (CLI::App* sub : {test, calibrate, bandwidth}) {
    add_data_options(sub, cfg, omega_text, seed_value);
  }
  for (CLI::App* sub : {test, calibrate}) {
    sub->add_option("--h", cfg.h, "bandwidth");
  }
  bandwidth->add_option("--grid", cfg.grid, "bandwidth grid h1,h2,..")->delimiter(',');
  bandwidth->add_option("--h", cfg.h, "pilot bandwidth for the default symmetric grid");

  simulate->add_flag("--table1", cfg.table1, "null mean and SD table");
  simulate->add_flag("--table2", cfg.table2, "size table for SELR and F-type tests");
  simulate->add_flag("--power", cfg.power, "power curves under an alternative");
  simulate->add_option("--n", cfg.n_list, "sample sizes")->delimiter(',');
  simulate->add_option("--c0", cfg.c0_list, "bandwidth factors in h = c0 n^(-2/9)")->delimiter(',');
  simulate->add_option("--c1", cfg.c1_list, "variance levels in 1 + c1 u^2")->delimiter(',');
  simulate->add_option("--h", cfg.h, "fixed bandwidth overriding c0");
  simulate->add_option("--reps", cfg.reps, "replicates per configuration");
  simulate->add_option("--alternative", cfg.alternative, "linear | sine");
  simulate->add_option("--r-grid", cfg.r_grid, "alternative levels")->delimiter(',');
  simulate->add_option("--threshold-selr", cfg.threshold_selr, "SELR critical value");
  simulate->add_option("--threshold-f", cfg.threshold_f, "F-type critical value");
  simulate->add_option("--kernel", cfg.kernel, "kernel");
  simulate->add_option("--seed", seed_value, "random seed (drawn and printed when absent)");
  simulate->add_option("--threads", cfg.threads, "worker threads");
  simulate->add_option("--output,-o", cfg.output, "CSV path (default: stdout)");
  simulate->add_option("--output-dir", cfg.output_dir, "directory for tables, plot data, manifest");
  simulate->add_option("--config", "key=value configuration file (flags win)");

  constants->add_option("--kernel", cfg.kernel, "kernel");
  constants->add_option("--output,-o", cfg.output, "output path (default: stdout)");

  try {
    std::vector<std::string> args = args_in;
    if (const auto path = find_config_path(args)) {
      args = merge_config(args, read_config_file(*path));
    }
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error[ConfigError]: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  }

  try {
    for (CLI::App* sub : app.get_subcommands()) cfg.command = sub->get_name();
    CLI::App* active = app.get_subcommands().front();
    if (!omega_text.empty()) cfg.omega = parse_omega(omega_text);
    const bool needs_seed = cfg.command == "simulate" || cfg.bootstrap > 0;
    if (active->get_option_no_throw("--seed") && active->count("--seed") > 0) {
      cfg.seed = seed_value;
    } else if (needs_seed) {
      std::random_device rd;
      cfg.seed = (static_cast<std::uint64_t>(rd()) << 32) | rd();
      err << "seed: " << *cfg.seed << '\n';
    }
    cfg.validate();
    if (cfg.command == "test") return run_test(cfg, out, false);
    if (cfg.command == "calibrate") return run_test(cfg, out, true);
    if (cfg.command == "bandwidth") return run_bandwidth(cfg, out);
    if (cfg.command == "simulate") return run_simulate(cfg, out);
    return run_kernel_constants(cfg, out);
  } catch (const Error& e) {
    err << "error[" << to_string(e.code()) << "]: " << e.what() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    err << "error[Internal]: " << e.what() << '\n';
    return 4;
  }
}

}  // namespace selr::cli
