#include "tc/csvio.hpp"

#include <charconv>
#include <stdexcept>
#include <string_view>
#include <system_error>

namespace tc::csvio {
namespace {

// std::to_chars/from_chars keep formatting locale-independent, which is
// what makes the produced files safe for byte-comparison golden tests.
std::string format_value(double v) {
  char buf[40];
  const auto res =
      std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 16);
  return std::string(buf, res.ptr);
}

double parse_value(std::string_view token, std::size_t line, std::size_t col) {
  double v = 0.0;
  const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
  if (res.ec != std::errc{} || res.ptr != token.data() + token.size())
    throw std::invalid_argument("parse_csv: line " + std::to_string(line) +
                                ", column " + std::to_string(col + 1) +
                                ": '" + std::string(token) + "' is not a number");
  return v;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

Column parse_header_field(std::string_view field) {
  if (field.size() >= 2 && field.back() == ')') {
    const std::size_t open = field.rfind(" (");
    if (open != std::string_view::npos)
      return {std::string(field.substr(0, open)),
              std::string(field.substr(open + 2, field.size() - open - 3))};
  }
  throw std::invalid_argument("parse_csv: header field '" + std::string(field) +
                              "' lacks a unit annotation");
}

}  // namespace

std::string format_csv(const Table& table) {
  std::string out;
  for (std::size_t c = 0; c < table.columns.size(); ++c) {
    if (c) out += ',';
    out += table.columns[c].name + " (" + table.columns[c].unit + ")";
  }
  out += '\n';
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::invalid_argument("format_csv: row width " +
                                  std::to_string(row.size()) +
                                  " does not match " +
                                  std::to_string(table.columns.size()) +
                                  " columns");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      out += format_value(row[c]);
    }
    out += '\n';
  }
  return out;
}

Table parse_csv(const std::string& text, const std::string& name) {
  Table table;
  table.name = name;
  std::string_view rest(text);
  std::size_t line_no = 0;
  bool have_header = false;
  while (!rest.empty()) {
    const std::size_t eol = rest.find('\n');
    const std::string_view line =
        eol == std::string_view::npos ? rest : rest.substr(0, eol);
    rest = eol == std::string_view::npos ? std::string_view{} : rest.substr(eol + 1);
    ++line_no;
    if (line.empty()) continue;

    const std::vector<std::string_view> fields = split_fields(line);
    if (!have_header) {
      for (const auto& f : fields) table.columns.push_back(parse_header_field(f));
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size())
      throw std::invalid_argument("parse_csv: line " + std::to_string(line_no) +
                                  " has " + std::to_string(fields.size()) +
                                  " fields, expected " +
                                  std::to_string(table.columns.size()));
    std::vector<double> row(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      row[c] = parse_value(fields[c], line_no, c);
    table.rows.push_back(std::move(row));
  }
  if (!have_header) throw std::invalid_argument("parse_csv: empty document");
  return table;
}

}  // namespace tc::csvio
