#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

namespace hotelwatt {

using Date = std::chrono::year_month_day;

/// Strict ISO-8601 calendar date, `YYYY-MM-DD`.  Returns nullopt for any
/// other shape or for impossible days such as 2011-02-30.
std::optional<Date> parse_iso_date(std::string_view text);

std::string format_iso_date(Date date);

Date add_days(Date date, int days);

/// Signed day count from `from` to `to`.
int days_between(Date from, Date to);

int day_of_year(Date date);

}  // namespace hotelwatt
