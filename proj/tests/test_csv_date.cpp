#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <functional>
#include <string>

#include "doctest.h"
#include "gridshock/csv.hpp"
#include "gridshock/date.hpp"
#include "gridshock/error.hpp"
#include "support/tmpdir.hpp"

using namespace gridshock;
using testsupport::TempDir;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::ParseError;
}

}  // namespace

TEST_CASE("parse_csv happy path") {
  CsvTable t = parse_csv("a,b\n1,2\n3,4\n", {"a", "b"}, "mem");
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[1][0] == "3");
  CHECK(t.source == "mem");
}

TEST_CASE("parse_csv accepts CRLF and skips blank lines") {
  CsvTable t = parse_csv("a,b\r\n1,2\r\n\n3,4\n", {"a", "b"}, "mem");
  CHECK(t.rows.size() == 2);
  CHECK(t.rows[0][1] == "2");
}

TEST_CASE("parse_csv rejects wrong header naming the source") {
  try {
    parse_csv("a,c\n1,2\n", {"a", "b"}, "edges.csv");
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParseError);
    CHECK(std::string(e.what()).find("edges.csv") != std::string::npos);
  }
}

TEST_CASE("parse_csv rejects ragged rows") {
  CHECK(code_of([] { parse_csv("a,b\n1\n", {"a", "b"}, "m"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_csv("a,b\n1,2,3\n", {"a", "b"}, "m"); }) == ErrorCode::ParseError);
}

TEST_CASE("strict numeric cells") {
  CHECK(to_double("1.5", "c") == 1.5);
  CHECK(to_double("-2e3", "c") == -2000.0);
  CHECK(to_int("42", "c") == 42);
  CHECK(code_of([] { to_double("1.5x", "c"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { to_double("", "c"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { to_double("nan", "c"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { to_double("inf", "c"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { to_int("1.5", "c"); }) == ErrorCode::ParseError);
}

TEST_CASE("fmt_double round trips and normalizes") {
  CHECK(fmt_double(0.1) == "0.1");
  CHECK(fmt_double(1.0) == "1");
  CHECK(fmt_double(-0.0) == "0");
  CHECK(fmt_double(1e300) == "1e+300");
  double v = 0.30000000000000004;
  CHECK(to_double(fmt_double(v), "c") == v);
}

TEST_CASE("write_file creates parents and read_file round trips") {
  TempDir dir("csv");
  std::string payload = "x\xE2\x82\xAC\n\nraw\r\n";
  write_file(dir.path() / "a" / "b" / "f.txt", payload);
  CHECK(read_file(dir.path() / "a" / "b" / "f.txt") == payload);
}

TEST_CASE("read_csv names the missing file") {
  try {
    read_csv("/nonexistent/gridshock.csv", {"a"});
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("gridshock.csv") != std::string::npos);
  }
}

TEST_CASE("parse_date strict ISO") {
  Date d = parse_date("2031-07-15");
  CHECK(d.year == 2031);
  CHECK(d.month == 7);
  CHECK(d.day == 15);
  CHECK(parse_date("2032-02-29") == Date{2032, 2, 29});  // leap year
  CHECK(code_of([] { parse_date("2031-02-29"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_date("2031-13-01"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_date("2031-00-10"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_date("2031-7-15"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_date("2031/07/15"); }) == ErrorCode::ParseError);
  CHECK(code_of([] { parse_date("31-07-15"); }) == ErrorCode::ParseError);
}

TEST_CASE("format_date round trips") {
  CHECK(format_date(Date{2031, 7, 5}) == "2031-07-05");
  CHECK(parse_date(format_date(Date{1999, 12, 31})) == Date{1999, 12, 31});
}

TEST_CASE("date ordering") {
  CHECK(Date{2031, 6, 30} < Date{2031, 7, 1});
  CHECK(Date{2030, 12, 31} < Date{2031, 1, 1});
  CHECK(Date{2031, 7, 1} == Date{2031, 7, 1});
}

TEST_CASE("in_day_window inclusive bounds") {
  CHECK(in_day_window(Date{2031, 5, 1}, 5, 1, 9, 30));
  CHECK(in_day_window(Date{2031, 9, 30}, 5, 1, 9, 30));
  CHECK(in_day_window(Date{2031, 7, 15}, 5, 1, 9, 30));
  CHECK_FALSE(in_day_window(Date{2031, 4, 30}, 5, 1, 9, 30));
  CHECK_FALSE(in_day_window(Date{2031, 10, 1}, 5, 1, 9, 30));
}

TEST_CASE("in_day_window wraps the year end") {
  CHECK(in_day_window(Date{2031, 12, 5}, 11, 1, 2, 28));
  CHECK(in_day_window(Date{2031, 1, 15}, 11, 1, 2, 28));
  CHECK_FALSE(in_day_window(Date{2031, 6, 5}, 11, 1, 2, 28));
}
