// errors.hpp -- error taxonomy shared by all distcast components.
#pragma once

#include <stdexcept>
#include <string>

namespace distcast {

enum class errc {
  missing_file,
  io_error,
  parse_error,
  non_monotone_dates,
  empty_series,
  degenerate_series,
  domain_error,
  non_positive_variance,
  perfect_separation,
  non_convergence,
  rank_deficient_basis,
  step1_failure,
  non_monotone_input,
  alignment_error,
  insufficient_data,
  singular_covariance,
  range_error,
  empty_range,
  config_error,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::missing_file:          return "missing_file";
    case errc::io_error:              return "io_error";
    case errc::parse_error:           return "parse_error";
    case errc::non_monotone_dates:    return "non_monotone_dates";
    case errc::empty_series:          return "empty_series";
    case errc::degenerate_series:     return "degenerate_series";
    case errc::domain_error:          return "domain_error";
    case errc::non_positive_variance: return "non_positive_variance";
    case errc::perfect_separation:    return "perfect_separation";
    case errc::non_convergence:       return "non_convergence";
    case errc::rank_deficient_basis:  return "rank_deficient_basis";
    case errc::step1_failure:         return "step1_failure";
    case errc::non_monotone_input:    return "non_monotone_input";
    case errc::alignment_error:       return "alignment_error";
    case errc::insufficient_data:     return "insufficient_data";
    case errc::singular_covariance:   return "singular_covariance";
    case errc::range_error:           return "range_error";
    case errc::empty_range:           return "empty_range";
    case errc::config_error:          return "config_error";
  }
  return "unknown";
}

/// Library-wide exception. `index` carries a line number, threshold index or
/// iteration count depending on the error kind (-1 when not applicable).
class Error : public std::runtime_error {
 public:
  Error(errc code, std::string message, long index = -1)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message),
        code_(code),
        index_(index) {}

  errc code() const noexcept { return code_; }
  long index() const noexcept { return index_; }

 private:
  errc code_;
  long index_;
};

[[noreturn]] inline void raise(errc code, const std::string& message, long index = -1) {
  throw Error(code, message, index);
}

}  // namespace distcast
