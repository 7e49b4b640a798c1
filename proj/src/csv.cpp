#include "fdsense/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace fdsense {

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header.size()) throw std::invalid_argument("CSV row width differs from header");
  rows.push_back(std::move(row));
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 32> buf{};
  const auto result = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), result.ptr);
}

namespace {

void write_field(std::ostream& out, const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) {
    out << s;
    return;
  }
  out << '"';
  for (char c : s) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

struct CellWriter {
  std::ostream& out;
  void operator()(double v) const { out << format_double(v); }
  void operator()(std::int64_t v) const { out << v; }
  void operator()(const std::string& v) const { write_field(out, v); }
};

}  // namespace

void write_csv(std::ostream& out, const CsvTable& table) {
  for (std::size_t i = 0; i < table.header.size(); ++i) {
    if (i) out << ',';
    write_field(out, table.header[i]);
  }
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::visit(CellWriter{out}, row[i]);
    }
    out << '\n';
  }
}

std::string to_csv(const CsvTable& table) {
  std::ostringstream out;
  write_csv(out, table);
  return out.str();
}

}  // namespace fdsense
