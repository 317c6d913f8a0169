#include "carmsieve/report.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

namespace carmsieve {

std::string format_power_of_ten(uint64_t m) {
  if (m >= 10) {
    uint64_t value = m;
    unsigned exponent = 0;
    while (value % 10 == 0) {
      value /= 10;
      ++exponent;
    }
    if (value == 1) return "10^" + std::to_string(exponent);
  }
  return std::to_string(m);
}

namespace {

std::string ratio_text(int64_t estimate, uint64_t actual) {
  if (actual == 0) return "-";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.5f",
                static_cast<double>(estimate) / static_cast<double>(actual));
  return buffer;
}

}  // namespace

std::string render_table(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("render_table: no rows");

  const std::vector<std::string> header = {"M", "E", "N", "E/N"};
  std::vector<std::vector<std::string>> cells;
  for (const ReportRow& row : rows)
    cells.push_back({format_power_of_ten(row.m_limit), std::to_string(row.estimate),
                     std::to_string(row.actual), ratio_text(row.estimate, row.actual)});

  std::vector<size_t> widths;
  for (size_t col = 0; col < header.size(); ++col) {
    size_t w = header[col].size();
    for (const auto& row : cells) w = std::max(w, row[col].size());
    widths.push_back(w);
  }

  std::string out;
  const auto emit = [&](const std::vector<std::string>& row) {
    for (size_t col = 0; col < row.size(); ++col) {
      if (col) out += " | ";
      out.append(widths[col] - row[col].size(), ' ');
      out += row[col];
    }
    out += '\n';
  };
  emit(header);
  for (size_t col = 0; col < header.size(); ++col) {
    if (col) out += "-+-";
    out.append(widths[col], '-');
  }
  out += '\n';
  for (const auto& row : cells) emit(row);
  return out;
}

std::string render_csv(const std::vector<ReportRow>& rows) {
  if (rows.empty()) throw std::invalid_argument("render_csv: no rows");
  std::string out = "M,E,N,ratio\n";
  for (const ReportRow& row : rows) {
    out += std::to_string(row.m_limit);
    out += ',';
    out += std::to_string(row.estimate);
    out += ',';
    out += std::to_string(row.actual);
    out += ',';
    out += ratio_text(row.estimate, row.actual);
    out += '\n';
  }
  return out;
}

}  // namespace carmsieve
