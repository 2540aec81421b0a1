// csv.hpp -- CSV ingestion of price/return series and CSV output helpers.
//
// Input format: UTF-8, header `date,value`, ISO-8601 dates, '.' decimal
// separator, one series per file. Rows with unparsable fields are rejected
// with their line number, never skipped.
#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "distcast/errors.hpp"
#include "distcast/series.hpp"

namespace distcast {

enum class LoadMode { returns, prices };

namespace detail {

inline std::string strip_cr(std::string s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == '\n')) s.pop_back();
  return s;
}

inline bool parse_double_strict(const std::string& s, double& out) {
  if (s.empty()) return false;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last) return false;
  return std::isfinite(out);
}

}  // namespace detail

/// Loads a `date,value` CSV. mode=prices converts levels to simple returns
/// r_t = P_t/P_{t-1} - 1 and drops the first row; mode=returns passes values
/// through unchanged.
inline ReturnSeries load_returns(const std::string& path, LoadMode mode) {
  if (!std::filesystem::exists(path))
    raise(errc::missing_file, path);
  std::ifstream in(path);
  if (!in) raise(errc::io_error, "cannot open " + path);

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) raise(errc::empty_series, path + " is empty");
  ++line_no;
  if (detail::strip_cr(line) != "date,value")
    raise(errc::parse_error, "expected header `date,value` in " + path, line_no);

  std::vector<Date> dates;
  std::vector<double> raw;
  while (std::getline(in, line)) {
    ++line_no;
    std::string row = detail::strip_cr(line);
    if (row.empty()) continue;
    auto comma = row.find(',');
    if (comma == std::string::npos)
      raise(errc::parse_error, "missing comma at line " + std::to_string(line_no), line_no);
    Date d;
    if (!parse_date(row.substr(0, comma), d))
      raise(errc::parse_error, "bad date at line " + std::to_string(line_no), line_no);
    double v;
    if (!detail::parse_double_strict(row.substr(comma + 1), v))
      raise(errc::parse_error, "bad value at line " + std::to_string(line_no), line_no);
    if (!dates.empty() && date_serial(d) <= date_serial(dates.back()))
      raise(errc::non_monotone_dates,
            "dates not strictly increasing at line " + std::to_string(line_no), line_no);
    dates.push_back(d);
    raw.push_back(v);
  }

  ReturnSeries s;
  if (mode == LoadMode::returns) {
    s.dates = std::move(dates);
    s.values = std::move(raw);
  } else {
    if (raw.size() < 3) raise(errc::empty_series, "need >= 3 price rows in " + path);
    for (std::size_t i = 1; i < raw.size(); ++i) {
      if (raw[i - 1] == 0.0)
        raise(errc::parse_error, "zero price at row " + std::to_string(i), long(i));
      s.dates.push_back(dates[i]);
      s.values.push_back(raw[i] / raw[i - 1] - 1.0);
    }
  }
  if (s.values.size() < 2) raise(errc::empty_series, path + " has too few rows");
  s.validate();
  return s;
}

inline std::string format_g12(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

inline std::string format_g17(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

/// Writes a dated value sequence as a `date,value` CSV.
inline void write_dated_csv(const std::string& path, const std::vector<Date>& dates,
                            const std::vector<double>& values,
                            const std::string& value_header = "value") {
  if (dates.size() != values.size())
    raise(errc::alignment_error, "dates/values length mismatch");
  std::ofstream out(path);
  if (!out) raise(errc::io_error, "cannot write " + path);
  out << "date," << value_header << "\n";
  for (std::size_t i = 0; i < dates.size(); ++i)
    out << format_date(dates[i]) << "," << format_g12(values[i]) << "\n";
  if (!out) raise(errc::io_error, "write failed for " + path);
}

}  // namespace distcast
