#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selr {

enum class ErrorCode {
  InvalidArgument,
  QuadratureFailure,
  InvalidGrid,
  DerivativeUnavailable,
  EmptyWindow,
  Infeasible,
  MaxIter,
  SingularDesign,
  DegenerateTest,
  DegenerateRSS1,
  ZeroVariance,
  NlsNonConvergence,
  AllInfeasible,
  MissingColumn,
  ParseError,
  EmptyFile,
  IoError,
  ConfigError,
};

std::string_view to_string(ErrorCode code);

/// Process exit status associated with an error: 2 config, 3 data, 4 numerical.
int exit_code(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selr
