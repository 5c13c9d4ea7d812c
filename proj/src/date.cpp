#include "gridshock/date.hpp"

#include <cctype>

#include "gridshock/error.hpp"

namespace gridshock {

namespace {

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (m == 2 && is_leap(y)) return 29;
  return kDays[m - 1];
}

}  // namespace

Date parse_date(const std::string& s) {
  auto bad = [&]() { fail(ErrorCode::ParseError, "not a YYYY-MM-DD date: '" + s + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') bad();
  for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) bad();
  Date d;
  d.year = std::stoi(s.substr(0, 4));
  d.month = std::stoi(s.substr(5, 2));
  d.day = std::stoi(s.substr(8, 2));
  if (d.month < 1 || d.month > 12 || d.day < 1 || d.day > days_in_month(d.year, d.month)) bad();
  return d;
}

std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", d.year, d.month, d.day);
  return buf;
}

bool in_day_window(const Date& d, int start_month, int start_day, int end_month, int end_day) {
  int md = d.month * 100 + d.day;
  int lo = start_month * 100 + start_day;
  int hi = end_month * 100 + end_day;
  if (lo <= hi) return md >= lo && md <= hi;
  return md >= lo || md <= hi;  // window wrapping the year end
}

}  // namespace gridshock
