#include "selr/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "selr/error.hpp"

namespace selr {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(trim(field));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool blank(const std::string& line) { return trim(line).empty(); }

std::string where(const std::string& source, std::size_t line, std::size_t column) {
  return source + ":" + std::to_string(line) + ":" + std::to_string(column);
}

}  // namespace

Dataset read_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::vector<std::string>> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || trim(line).front() == '#') continue;
    header = split(line);
    break;
  }
  if (!header) throw Error(ErrorCode::EmptyFile, source + ": no header row");

  std::map<std::string, std::size_t> col;
  for (std::size_t k = 0; k < header->size(); ++k) col[(*header)[k]] = k;
  if (!col.count("u")) throw Error(ErrorCode::MissingColumn, source + ": missing column 'u'");
  if (!col.count("y")) throw Error(ErrorCode::MissingColumn, source + ": missing column 'y'");
  std::vector<std::size_t> xcols;
  for (int k = 1;; ++k) {
    const auto it = col.find("x" + std::to_string(k));
    if (it == col.end()) break;
    xcols.push_back(it->second);
  }
  if (xcols.empty()) throw Error(ErrorCode::MissingColumn, source + ": missing column 'x1'");
  for (const auto& [name, idx] : col) {
    if (name.size() > 1 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const auto k = static_cast<std::size_t>(std::stoul(name.substr(1)));
      if (k > xcols.size()) {
        throw Error(ErrorCode::MissingColumn,
                    source + ": column '" + name + "' present but 'x" +
                        std::to_string(xcols.size() + 1) + "' missing");
      }
    }
  }

  std::vector<double> u, y, x;
  std::vector<std::string> bad_rows;
  const std::size_t p = xcols.size();
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line) || trim(line).front() == '#') continue;
    const std::vector<std::string> fields = split(line);
    if (fields.size() != header->size()) {
      throw Error(ErrorCode::ParseError, where(source, line_no, fields.size() + 1) +
                                             ": expected " + std::to_string(header->size()) +
                                             " fields, found " + std::to_string(fields.size()));
    }
    auto parse = [&](std::size_t k) {
      const std::string& f = fields[k];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || ptr != f.data() + f.size() ||
          (ec != std::errc() && ec != std::errc::result_out_of_range)) {
        throw Error(ErrorCode::ParseError, where(source, line_no, k + 1) +
                                               ": cannot parse '" + f + "' as a number");
      }
      return v;
    };
    std::vector<double> row(p + 2);
    row[0] = parse(col["u"]);
    for (std::size_t k = 0; k < p; ++k) row[1 + k] = parse(xcols[k]);
    row[p + 1] = parse(col["y"]);
    bool finite = true;
    for (double v : row) finite = finite && std::isfinite(v);
    if (!finite) {
      bad_rows.push_back(std::to_string(line_no));
      continue;
    }
    u.push_back(row[0]);
    for (std::size_t k = 0; k < p; ++k) x.push_back(row[1 + k]);
    y.push_back(row[p + 1]);
  }
  if (!bad_rows.empty()) {
    std::string lines;
    for (std::size_t k = 0; k < bad_rows.size(); ++k) lines += (k ? "," : "") + bad_rows[k];
    throw Error(ErrorCode::ParseError, source + ": non-finite values on line(s) " + lines);
  }
  if (u.empty()) throw Error(ErrorCode::EmptyFile, source + ": no data rows");

  Dataset out;
  const auto n = static_cast<Eigen::Index>(u.size());
  out.u = Eigen::Map<const Eigen::VectorXd>(u.data(), n);
  out.y = Eigen::Map<const Eigen::VectorXd>(y.data(), n);
  out.x = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      x.data(), n, static_cast<Eigen::Index>(p));
  return out;
}

Dataset ingest_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  return read_csv(in, path);
}

void write_csv(std::ostream& out, const Dataset& data) {
  out << "u";
  for (Eigen::Index k = 0; k < data.p(); ++k) out << ",x" << k + 1;
  out << ",y\n";
  const auto old = out.precision(17);
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    out << data.u[i];
    for (Eigen::Index k = 0; k < data.p(); ++k) out << ',' << data.x(i, k);
    out << ',' << data.y[i] << '\n';
  }
  out.precision(old);
}

void write_csv(const std::string& path, const Dataset& data) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::IoError, "cannot write '" + path + "'");
  write_csv(out, data);
}

}  // namespace selr
