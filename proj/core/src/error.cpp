#include "selr/error.hpp"

namespace selr {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::QuadratureFailure: return "QuadratureFailure";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::DerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::EmptyWindow: return "EmptyWindow";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::MaxIter: return "MaxIter";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::DegenerateTest: return "DegenerateTest";
    case ErrorCode::DegenerateRSS1: return "DegenerateRSS1";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::NlsNonConvergence: return "NlsNonConvergence";
    case ErrorCode::AllInfeasible: return "AllInfeasible";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

int exit_code(ErrorCode code) {
  switch (code) {
    case ErrorCode::ConfigError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::InvalidGrid:
    case ErrorCode::DerivativeUnavailable:
      return 2;
    case ErrorCode::MissingColumn:
    case ErrorCode::ParseError:
    case ErrorCode::EmptyFile:
    case ErrorCode::IoError:
    case ErrorCode::EmptyWindow:
      return 3;
    default:
      return 4;
  }
}

}  // namespace selr
