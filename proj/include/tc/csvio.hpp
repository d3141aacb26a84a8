#pragma once

#include <string>
#include <vector>

namespace tc::csvio {

// One named, unit-annotated numeric column.  Units go into the header as
// "name (unit)", so neither part may contain a comma.
struct Column {
  std::string name;
  std::string unit;
};

// A rectangular numeric table; `name` doubles as the output file stem.
struct Table {
  std::string name;
  std::vector<Column> columns;
  std::vector<std::vector<double>> rows;
};

// Render as CSV: comma delimiter, LF line endings, '.' decimal separator,
// scientific notation with 17 significant digits so every double survives
// a write/read cycle bit-exactly.
std::string format_csv(const Table& table);

// Strict inverse of format_csv: one "name (unit)" header row, then numeric
// rows of matching width.  Throws std::invalid_argument on malformed input.
Table parse_csv(const std::string& text, const std::string& name = "");

}  // namespace tc::csvio
