// series.hpp -- dated return series, the universal input type.
#pragma once

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "distcast/errors.hpp"

namespace distcast {

using Date = std::chrono::year_month_day;

inline Date make_date(int y, unsigned m, unsigned d) {
  return Date{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
}

inline long date_serial(const Date& d) {
  return std::chrono::sys_days(d).time_since_epoch().count();
}

inline std::string format_date(const Date& d) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", int(d.year()),
                unsigned(d.month()), unsigned(d.day()));
  return buf;
}

/// Parses strict ISO-8601 "YYYY-MM-DD". Returns false on any malformation,
/// including calendar-invalid dates such as month 13 or Feb 30.
inline bool parse_date(const std::string& s, Date& out) {
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') return false;
  for (int i : {0, 1, 2, 3, 5, 6, 8, 9})
    if (s[i] < '0' || s[i] > '9') return false;
  int y = std::stoi(s.substr(0, 4));
  unsigned m = unsigned(std::stoi(s.substr(5, 2)));
  unsigned d = unsigned(std::stoi(s.substr(8, 2)));
  Date cand = make_date(y, m, d);
  if (!cand.ok()) return false;
  out = cand;
  return true;
}

/// Dated sequence of simple returns (0.01 == 1%). Dates strictly increasing,
/// values finite, length >= 2.
struct ReturnSeries {
  std::vector<Date> dates;
  std::vector<double> values;

  std::size_t size() const { return values.size(); }

  void validate() const {
    if (dates.size() != values.size())
      raise(errc::alignment_error, "dates and values differ in length");
    if (values.size() < 2)
      raise(errc::empty_series, "need at least 2 observations");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!std::isfinite(values[i]))
        raise(errc::parse_error, "non-finite return at position " + std::to_string(i),
              long(i));
      if (i > 0 && date_serial(dates[i]) <= date_serial(dates[i - 1]))
        raise(errc::non_monotone_dates,
              "dates not strictly increasing at " + format_date(dates[i]), long(i));
    }
  }
};

/// Builds a series on synthetic consecutive calendar dates starting at
/// `start`; used by the simulator and by tests.
inline ReturnSeries series_from_values(std::vector<double> values,
                                       Date start = make_date(2000, 1, 3)) {
  ReturnSeries s;
  s.values = std::move(values);
  s.dates.reserve(s.values.size());
  auto day = std::chrono::sys_days(start);
  for (std::size_t i = 0; i < s.values.size(); ++i) {
    s.dates.push_back(Date{day});
    day += std::chrono::days{1};
  }
  s.validate();
  return s;
}

/// In-sample / total split of a sample: 0 < in_sample_len < total_len.
struct SampleSplit {
  std::size_t in_sample_len = 0;
  std::size_t total_len = 0;

  void validate() const {
    if (in_sample_len == 0 || in_sample_len >= total_len)
      raise(errc::config_error, "sample split requires 0 < R < T");
  }
  std::size_t out_of_sample_len() const { return total_len - in_sample_len; }
};

}  // namespace distcast
