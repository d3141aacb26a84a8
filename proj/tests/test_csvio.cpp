#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>
#include <cstdint>
#include <numbers>
#include <string>

#include "tc/csvio.hpp"

using tc::csvio::Column;
using tc::csvio::format_csv;
using tc::csvio::parse_csv;
using tc::csvio::Table;

namespace {

bool same_bits(double a, double b) {
  return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

}  // namespace

TEST_CASE("format renders 17 significant digits with LF endings") {
  Table t;
  t.name = "demo";
  t.columns = {{"time_ns", "ns"}, {"value", "dimensionless"}};
  t.rows = {{1.0, 0.5}};
  const std::string text = format_csv(t);
  CHECK(text ==
        "time_ns (ns),value (dimensionless)\n"
        "1.0000000000000000e+00,5.0000000000000000e-01\n");
  CHECK(text.find('\r') == std::string::npos);
}

TEST_CASE("write/read roundtrip preserves every bit") {
  Table t;
  t.name = "roundtrip";
  t.columns = {{"a", "ns"}, {"b", "MHz"}, {"c", "count"}};
  t.rows = {{std::numbers::pi, 1.0 / 3.0, 6.02214076e23},
            {-0.0, 1e-300, -2.2250738585072014e-308},
            {123456789.123456789, -std::numbers::e, 5e-324}};
  const Table back = parse_csv(format_csv(t), t.name);
  REQUIRE(back.columns.size() == 3);
  CHECK(back.columns[0].name == "a");
  CHECK(back.columns[0].unit == "ns");
  CHECK(back.columns[1].name == "b");
  CHECK(back.columns[1].unit == "MHz");
  REQUIRE(back.rows.size() == t.rows.size());
  for (std::size_t r = 0; r < t.rows.size(); ++r)
    for (std::size_t c = 0; c < 3; ++c) CHECK(same_bits(back.rows[r][c], t.rows[r][c]));
  CHECK(std::signbit(back.rows[1][0]));  // -0.0 survives
}

TEST_CASE("header-only tables roundtrip to zero rows") {
  Table t;
  t.name = "empty";
  t.columns = {{"x", "1"}};
  const Table back = parse_csv(format_csv(t));
  CHECK(back.columns.size() == 1);
  CHECK(back.rows.empty());
}

TEST_CASE("malformed documents are rejected with positions") {
  CHECK_THROWS_WITH_AS(parse_csv(""), "parse_csv: empty document",
                       std::invalid_argument);
  // Header fields must carry a unit annotation.
  CHECK_THROWS_AS(parse_csv("plain_name\n1.0\n"), std::invalid_argument);
  // Ragged data row.
  CHECK_THROWS_AS(parse_csv("a (1),b (1)\n1.0\n"), std::invalid_argument);
  // Non-numeric cell names the line and column.
  CHECK_THROWS_WITH_AS(parse_csv("a (1)\noops\n"),
                       "parse_csv: line 2, column 1: 'oops' is not a number",
                       std::invalid_argument);

  Table ragged;
  ragged.name = "r";
  ragged.columns = {{"a", "1"}, {"b", "1"}};
  ragged.rows = {{1.0}};
  CHECK_THROWS_AS(format_csv(ragged), std::invalid_argument);
}
