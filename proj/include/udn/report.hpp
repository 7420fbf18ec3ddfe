#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <variant>
#include <vector>

#include "udn/errors.hpp"

namespace udn {

/// Tabular experiment output destined for CSV.
struct MetricReport {
  using Cell = std::variant<std::string, double, std::int64_t>;

  std::vector<std::string> header;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row) {
    if (row.size() != header.size())
      throw invalid_parameter("MetricReport: row width does not match the header");
    rows.push_back(std::move(row));
  }
};

namespace report_detail {

/// Doubles render with 9 significant digits; integers exactly.
inline std::string format_cell(const MetricReport::Cell& cell) {
  if (const auto* s = std::get_if<std::string>(&cell)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return std::to_string(*i);
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", std::get<double>(cell));
  return buf;
}

/// RFC-4180 quoting: fields with commas, quotes, or newlines get quoted.
inline std::string escape_field(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

}  // namespace report_detail

inline std::string to_csv(const MetricReport& report) {
  std::string out;
  for (std::size_t c = 0; c < report.header.size(); ++c) {
    if (c > 0) out += ',';
    out += report_detail::escape_field(report.header[c]);
  }
  out += '\n';
  for (const auto& row : report.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      out += report_detail::escape_field(report_detail::format_cell(row[c]));
    }
    out += '\n';
  }
  return out;
}

/// Writes the report as CSV with LF newlines regardless of platform.
inline void write_csv(const MetricReport& report, const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw std::runtime_error("write_csv: cannot open " + path.string());
  const std::string body = to_csv(report);
  file.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!file)
    throw std::runtime_error("write_csv: write failed for " + path.string());
}

/// Dense numeric matrix without a header (map exports).
inline void write_matrix_csv(const std::vector<std::vector<double>>& matrix,
                             const std::filesystem::path& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file)
    throw std::runtime_error("write_matrix_csv: cannot open " + path.string());
  std::string out;
  char buf[40];
  for (const auto& row : matrix) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c > 0) out += ',';
      std::snprintf(buf, sizeof(buf), "%.9g", row[c]);
      out += buf;
    }
    out += '\n';
  }
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file)
    throw std::runtime_error("write_matrix_csv: write failed for " + path.string());
}

}  // namespace udn
