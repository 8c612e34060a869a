#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hotelwatt::csv {

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column, if present.
  std::optional<std::size_t> column(std::string_view name) const;
};

/// Reads a comma-separated document.  Fields are trimmed of surrounding
/// whitespace, CRLF line endings and a leading UTF-8 BOM are accepted and
/// blank lines are skipped.  Quoting is not supported.
Table read(std::string_view text);

std::optional<double> parse_double(std::string_view text);

/// Shortest decimal that round-trips to the same double.
std::string format_double(double value);

/// Joins fields with commas and terminates the line with '\n'.
std::string join_row(const std::vector<std::string>& fields);

}  // namespace hotelwatt::csv
