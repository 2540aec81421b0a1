// ewma.hpp -- exponentially weighted moving-average conditional variance.
#pragma once

#include <cmath>
#include <numeric>
#include <vector>

#include "distcast/errors.hpp"
#include "distcast/series.hpp"

namespace distcast {

/// Conditional variances aligned to the dates of the return series that
/// produced them. Values are floored at `variance_floor`.
struct VarianceSeries {
  std::vector<double> values;
};

enum class EwmaInit { sample_var, first_sq };

constexpr double variance_floor = 1e-12;

namespace detail {

inline double sample_variance(const std::vector<double>& v) {
  const double n = double(v.size());
  double mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / (n - 1.0);
}

}  // namespace detail

/// sigma2_t = lambda * sigma2_{t-1} + (1-lambda) * r_{t-1}^2, with sigma2_1
/// fixed by the init policy. Output length equals input length.
inline VarianceSeries ewma_variance(const ReturnSeries& returns, double lambda = 0.94,
                                    EwmaInit init = EwmaInit::sample_var) {
  returns.validate();
  if (!(lambda > 0.0 && lambda < 1.0))
    raise(errc::domain_error, "ewma decay must lie in (0,1)");
  const auto& r = returns.values;

  double s0;
  if (init == EwmaInit::sample_var) {
    s0 = detail::sample_variance(r);
    if (s0 <= 0.0)
      raise(errc::degenerate_series, "sample variance of window is zero");
  } else {
    s0 = r[0] * r[0];
  }

  VarianceSeries out;
  out.values.resize(r.size());
  out.values[0] = std::max(s0, variance_floor);
  for (std::size_t t = 1; t < r.size(); ++t) {
    double v = lambda * out.values[t - 1] + (1.0 - lambda) * r[t - 1] * r[t - 1];
    out.values[t] = std::max(v, variance_floor);
  }
  return out;
}

/// One-step-ahead EWMA variance given the last filtered value and the last
/// observed return.
inline double ewma_step(double last_sigma2, double last_return, double lambda) {
  return std::max(lambda * last_sigma2 + (1.0 - lambda) * last_return * last_return,
                  variance_floor);
}

}  // namespace distcast
