#pragma once

#include <string>

#include "selr/selr.hpp"

namespace selr {

inline constexpr const char* kReportSchemaVersion = "selr.report/1";

struct ReportContext {
  std::string kernel;
  std::string estimating_function;
  std::string null_description;
  std::string bootstrap_scheme;
  std::uint64_t seed = 0;
  bool has_seed = false;
};

/// Deterministic JSON report; the same inputs give byte-identical output.
std::string report_json(const TestResult& result, const ReportContext& context);

std::string bandwidth_report_json(const BandwidthSelection& selection,
                                  const ReportContext& context);

/// Run metadata kept apart from the report: tool version and UTC timestamp.
std::string metadata_json(const std::string& command);

}  // namespace selr
