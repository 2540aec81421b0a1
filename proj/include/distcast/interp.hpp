// interp.hpp -- monotone cubic Hermite interpolation of discrete CDF values
// and the probability integral transform built on it.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "distcast/errors.hpp"
#include "distcast/ordered.hpp"
#include "distcast/series.hpp"

namespace distcast {

/// Monotone cubic Hermite interpolant of a strictly increasing CDF sampled at
/// strictly increasing abscissas spanning ordinates 0 to 1. Tangents are the
/// secant averages, rescaled per segment whenever alpha^2 + beta^2 > 9 with
/// alpha = m_k/Delta_k and beta = m_{k+1}/Delta_k, which keeps the evaluated
/// spline nondecreasing. Evaluation clamps to 0 below the first knot and 1
/// above the last.
class MonotoneInterpolator {
 public:
  MonotoneInterpolator(std::vector<double> xs, std::vector<double> ys)
      : x_(std::move(xs)), y_(std::move(ys)) {
    if (x_.size() != y_.size() || x_.size() < 2)
      raise(errc::non_monotone_input, "need >= 2 knots with matching lengths");
    if (y_.front() != 0.0 || y_.back() != 1.0)
      raise(errc::non_monotone_input, "CDF knots must span 0 to 1");
    for (std::size_t i = 1; i < x_.size(); ++i) {
      if (!(x_[i] > x_[i - 1]))
        raise(errc::non_monotone_input, "knot abscissas must be strictly increasing");
      if (!(y_[i] > y_[i - 1]))
        raise(errc::non_monotone_input, "knot ordinates must be strictly increasing");
    }

    const std::size_t K = x_.size() - 1;  // number of segments
    std::vector<double> secant(K);
    for (std::size_t k = 0; k < K; ++k) {
      double dx = x_[k + 1] - x_[k];
      secant[k] = (y_[k + 1] - y_[k]) / dx;
      if (!(secant[k] > 0.0))
        raise(errc::non_monotone_input, "zero secant despite increasing ordinates");
    }

    m_.resize(K + 1);
    m_.front() = secant.front();
    m_.back() = secant.back();
    for (std::size_t k = 1; k < K; ++k) m_[k] = 0.5 * (secant[k - 1] + secant[k]);

    for (std::size_t k = 0; k < K; ++k) {
      double a = m_[k] / secant[k];
      double b = m_[k + 1] / secant[k];
      double s = a * a + b * b;
      if (s > 9.0) {
        double tau = 3.0 / std::sqrt(s);
        m_[k] = tau * a * secant[k];
        m_[k + 1] = tau * b * secant[k];
      }
    }
  }

  double min_x() const { return x_.front(); }
  double max_x() const { return x_.back(); }

  double operator()(double r) const {
    if (r <= x_.front()) return r < x_.front() ? 0.0 : y_.front();
    if (r >= x_.back()) return r > x_.back() ? 1.0 : y_.back();
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      (x_[mid] <= r ? lo : hi) = mid;
    }
    const double h = x_[lo + 1] - x_[lo];
    const double t = (r - x_[lo]) / h;
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y_[lo] + (t3 - 2.0 * t2 + t) * h * m_[lo] +
           (-2.0 * t3 + 3.0 * t2) * y_[lo + 1] + (t3 - t2) * h * m_[lo + 1];
  }

  /// Inverse by bisection; defined for u in [0,1] on [min_x, max_x].
  double inverse(double u) const {
    double lo = x_.front(), hi = x_.back();
    for (int it = 0; it < 200 && hi - lo > 1e-15 * (std::fabs(hi) + 1.0); ++it) {
      double mid = 0.5 * (lo + hi);
      ((*this)(mid) < u ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

 private:
  std::vector<double> x_, y_, m_;
};

/// Interpolator over one forecast: exact 0 at 2*r_min, the forecast CDF at
/// the cutoffs, exact 1 at 2*r_max.
inline MonotoneInterpolator forecast_interpolator(const DistForecast& fc, double r_min,
                                                  double r_max) {
  const std::size_t p = fc.cdf_values.size();
  std::vector<double> xs, ys;
  xs.reserve(p + 2);
  ys.reserve(p + 2);
  xs.push_back(2.0 * r_min);
  ys.push_back(0.0);
  for (std::size_t j = 0; j < p; ++j) {
    xs.push_back(fc.partition.cutoffs[j]);
    ys.push_back(fc.cdf_values[j]);
  }
  xs.push_back(2.0 * r_max);
  ys.push_back(1.0);
  return MonotoneInterpolator(std::move(xs), std::move(ys));
}

/// Probability integral transform of one realized return.
struct GeneralizedResidual {
  Date date{};
  double value = 0.0;
};

/// Evaluates each forecast's interpolated CDF at its realized return.
/// r_min/r_max are the in-sample return extremes used for the tail knots.
inline std::vector<GeneralizedResidual> generalized_residuals(
    const std::vector<DistForecast>& forecasts, const std::vector<Date>& dates,
    const std::vector<double>& realized, double r_min, double r_max) {
  if (forecasts.size() != realized.size() || dates.size() != realized.size())
    raise(errc::alignment_error, "forecasts and realized returns differ in length");
  std::vector<GeneralizedResidual> out;
  out.reserve(forecasts.size());
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    if (date_serial(forecasts[i].date) != date_serial(dates[i]))
      raise(errc::alignment_error,
            "forecast date " + format_date(forecasts[i].date) + " != " +
                format_date(dates[i]));
    auto interp = forecast_interpolator(forecasts[i], r_min, r_max);
    out.push_back({dates[i], interp(realized[i])});
  }
  return out;
}

inline std::vector<double> residual_values(const std::vector<GeneralizedResidual>& res) {
  std::vector<double> v;
  v.reserve(res.size());
  for (const auto& r : res) v.push_back(r.value);
  return v;
}

}  // namespace distcast
