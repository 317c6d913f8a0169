#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace carmsieve {

struct ReportRow {
  uint64_t m_limit = 0;
  int64_t estimate = 0;
  uint64_t actual = 0;
};

// "10^j" when m is an exact power of ten, plain decimal otherwise.
std::string format_power_of_ten(uint64_t m);

// Fixed-width table with columns M | E | N | E/N; the ratio is printed with
// five decimals, or "-" when the actual count is zero.
std::string render_table(const std::vector<ReportRow>& rows);

// "M,E,N,ratio" with a header line; M in plain decimal.
std::string render_csv(const std::vector<ReportRow>& rows);

}  // namespace carmsieve
