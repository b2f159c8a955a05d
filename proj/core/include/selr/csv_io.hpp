#pragma once

#include <iosfwd>
#include <string>

#include "selr/dataset.hpp"

namespace selr {

/// Reads a CSV with a header naming u, x1..xp and y in any order. Extra
/// columns are ignored. Throws MissingColumn, ParseError (with line and
/// column) or EmptyFile; rows with non-finite values are rejected.
Dataset ingest_csv(const std::string& path);
Dataset read_csv(std::istream& in, const std::string& source = "<stream>");

/// Writes u, x1..xp, y with 17 significant digits.
void write_csv(std::ostream& out, const Dataset& data);
void write_csv(const std::string& path, const Dataset& data);

}  // namespace selr
