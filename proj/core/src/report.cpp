#include "selr/report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>

#include "json.hpp"

namespace selr {
namespace {

using Json = nlohmann::ordered_json;

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

std::string report_json(const TestResult& result, const ReportContext& context) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["hypothesis"] = to_string(result.kind);
  doc["null"] = context.null_description;
  doc["kernel"] = context.kernel;
  doc["g"] = context.estimating_function;
  doc["h"] = result.calibration.h;
  doc["statistic"] = result.statistic;
  doc["scaled"] = result.scaled;
  doc["df"] = result.calibration.df;
  doc["r_K"] = result.calibration.r_K;
  doc["c_K"] = result.calibration.c_K;
  doc["omega_length"] = result.calibration.omega_len;
  doc["retained_fraction"] = result.calibration.retained_fraction;
  doc["p_asymptotic"] = optional_number(result.p_asymptotic);
  doc["p_bootstrap"] = optional_number(result.p_bootstrap);
  doc["B"] = result.bootstrap_reps;
  doc["bootstrap_scheme"] =
      result.bootstrap_reps > 0 ? Json(context.bootstrap_scheme) : Json(nullptr);
  doc["seed"] = context.has_seed ? Json(context.seed) : Json(nullptr);
  doc["n_evaluated"] = result.n_evaluated;
  doc["n_skipped"] = result.n_skipped;
  doc["n_clamped"] = result.n_clamped;
  if (result.theta_hat) {
    Json theta = Json::array();
    for (Eigen::Index k = 0; k < result.theta_hat->size(); ++k) theta.push_back((*result.theta_hat)[k]);
    doc["theta_hat"] = theta;
  } else {
    doc["theta_hat"] = nullptr;
  }
  doc["warnings"] = result.warnings;
  Json points = Json::array();
  for (const PointDiagnostic& d : result.per_point) {
    points.push_back({{"u0", d.u0},
                      {"null_term", d.null_term},
                      {"full_term", d.full_term},
                      {"contribution", d.contribution},
                      {"status", d.status}});
  }
  doc["per_point"] = points;
  return doc.dump(2) + "\n";
}

std::string bandwidth_report_json(const BandwidthSelection& selection,
                                  const ReportContext& context) {
  Json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["null"] = context.null_description;
  doc["kernel"] = context.kernel;
  doc["g"] = context.estimating_function;
  doc["h_hat"] = selection.h_hat;
  doc["max_standardized"] = selection.max_standardized;
  Json grid = Json::array();
  for (std::size_t k = 0; k < selection.grid.size(); ++k) {
    const double z = selection.standardized[k];
    grid.push_back({{"h", selection.grid[k]},
                    {"standardized", std::isfinite(z) ? Json(z) : Json(nullptr)}});
  }
  doc["grid"] = grid;
  doc["p_bootstrap"] = optional_number(selection.p_bootstrap);
  doc["B"] = selection.replicate_max.size();
  doc["seed"] = context.has_seed ? Json(context.seed) : Json(nullptr);
  return doc.dump(2) + "\n";
}

std::string metadata_json(const std::string& command) {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  Json doc;
  doc["tool"] = "selr";
  doc["version"] = SELR_VERSION;
  doc["command"] = command;
  doc["timestamp"] = buf;
  return doc.dump(2) + "\n";
}

}  // namespace selr
