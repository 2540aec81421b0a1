// predictors.hpp -- lagged predictor panel for the binary choice models.
#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "distcast/errors.hpp"
#include "distcast/partition.hpp"
#include "distcast/series.hpp"

namespace distcast {

/// Dampened absolute-return volatility proxy.
inline double vol_proxy(double r) { return std::log1p(std::fabs(r)); }

/// Predictor values for one (target, threshold) pair. indicator is the lagged
/// exceedance 1{r_{t-1} <= c_j}; proxy is vol_proxy(r_{t-1}).
struct PredictorRow {
  double indicator = 0.0;
  double volproxy = 0.0;
};

/// Dense panel of k predictor values per (target t, threshold j). Targets are
/// r_1..r_{n-1} of the originating window (0-based); predictors come from the
/// preceding return.
class PredictorPanel {
 public:
  PredictorPanel() = default;
  PredictorPanel(std::size_t n_obs, std::size_t p, std::size_t k)
      : n_obs_(n_obs), p_(p), k_(k), data_(n_obs * p * k, 0.0) {}

  std::size_t n_obs() const { return n_obs_; }
  std::size_t p() const { return p_; }
  std::size_t k() const { return k_; }

  double& at(std::size_t t, std::size_t j, std::size_t l) {
    return data_[(t * p_ + j) * k_ + l];
  }
  double at(std::size_t t, std::size_t j, std::size_t l) const {
    return data_[(t * p_ + j) * k_ + l];
  }

  PredictorRow row(std::size_t t, std::size_t j) const {
    return PredictorRow{at(t, j, 0), k_ > 1 ? at(t, j, 1) : 0.0};
  }

 private:
  std::size_t n_obs_ = 0, p_ = 0, k_ = 0;
  std::vector<double> data_;
};

/// Panel for a window under per-target partitions. partitions.size() must be
/// 1 (shared) or returns.size() (per-day); row t uses the partition in force
/// for target index t+1 of the window.
inline PredictorPanel build_predictors(const std::vector<double>& returns,
                                       const std::vector<Partition>& partitions) {
  if (returns.size() < 2)
    raise(errc::empty_series, "predictor panel needs >= 2 returns");
  if (partitions.empty())
    raise(errc::config_error, "no partitions supplied");
  const bool shared = partitions.size() == 1;
  if (!shared && partitions.size() != returns.size())
    raise(errc::alignment_error, "partitions must be shared or per-day");
  const std::size_t p = partitions.front().size();
  const std::size_t n = returns.size() - 1;

  PredictorPanel panel(n, p, 2);
  for (std::size_t t = 0; t < n; ++t) {
    const double prev = returns[t];
    const double proxy = vol_proxy(prev);
    const Partition& part = shared ? partitions.front() : partitions[t + 1];
    for (std::size_t j = 0; j < p; ++j) {
      panel.at(t, j, 0) = prev <= part.cutoffs[j] ? 1.0 : 0.0;
      panel.at(t, j, 1) = proxy;
    }
  }
  return panel;
}

inline PredictorPanel build_predictors(const ReturnSeries& returns, const Partition& part) {
  return build_predictors(returns.values, std::vector<Partition>{part});
}

/// Predictors for a single forecast target given the last observed return.
inline std::vector<PredictorRow> forecast_predictors(double last_return,
                                                     const Partition& part) {
  std::vector<PredictorRow> rows(part.size());
  const double proxy = vol_proxy(last_return);
  for (std::size_t j = 0; j < part.size(); ++j)
    rows[j] = PredictorRow{last_return <= part.cutoffs[j] ? 1.0 : 0.0, proxy};
  return rows;
}

/// Index of the bin (c_{j-1}, c_j] containing r, in 1..p+1.
inline std::size_t bin_index(const std::vector<double>& cutoffs, double r) {
  std::size_t lo = 0, hi = cutoffs.size();
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (cutoffs[mid] >= r)
      hi = mid;
    else
      lo = mid + 1;
  }
  return lo + 1;
}

}  // namespace distcast
