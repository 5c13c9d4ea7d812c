#pragma once

#include <compare>
#include <string>

namespace gridshock {

struct Date {
  int year = 0;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;
};

// Strict ISO "YYYY-MM-DD"; rejects impossible dates (leap years honoured).
Date parse_date(const std::string& s);
std::string format_date(const Date& d);

// Inclusive month/day window within a year, e.g. (5,1)..(9,30).
bool in_day_window(const Date& d, int start_month, int start_day, int end_month, int end_day);

}  // namespace gridshock
