#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace fdsense {

using CsvCell = std::variant<double, std::int64_t, std::string>;

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<CsvCell>> rows;

  /// Throws std::invalid_argument if the row width differs from the header.
  void add_row(std::vector<CsvCell> row);
};

/// Shortest decimal that parses back to exactly `value`.
std::string format_double(double value);

/// UTF-8, LF line endings, header first. Strings containing a comma, quote or
/// newline are quoted.
void write_csv(std::ostream& out, const CsvTable& table);
std::string to_csv(const CsvTable& table);

}  // namespace fdsense
