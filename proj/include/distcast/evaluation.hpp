// evaluation.hpp -- specification tests and proper scoring rules for
// distributional forecasts: generalized autocontour chi-squared tests, Brier
// score, CRPS via Gauss-Chebyshev quadrature, and BIC.
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "distcast/errors.hpp"
#include "distcast/interp.hpp"
#include "distcast/ordered.hpp"
#include "distcast/stats.hpp"

namespace distcast {

inline constexpr int default_grs_sims = 2000;

/// Result of one generalized autocontour chi-squared test.
struct GrsResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  std::string variant;         // "contour_agg" or "lag_agg"
  std::vector<double> sides;   // contour variant: all sides; lag variant: the one side
  int lag = 0;                 // contour variant: fixed lag
  int max_lag = 0;             // lag variant: lags 1..max_lag
};

/// Sample proportion of residual pairs (eps_t, eps_{t-lag}) inside the square
/// [0, sqrt(side)]^2.
inline double autocontour_proportion(const std::vector<double>& residuals, double side,
                                     int lag) {
  if (lag < 1) raise(errc::domain_error, "lag must be >= 1");
  if (residuals.size() <= std::size_t(lag))
    raise(errc::insufficient_data, "residual series shorter than lag");
  const double s = std::sqrt(side);
  std::size_t count = 0;
  for (std::size_t t = std::size_t(lag); t < residuals.size(); ++t)
    if (residuals[t] <= s && residuals[t - lag] <= s) ++count;
  return double(count) / double(residuals.size() - std::size_t(lag));
}

namespace detail {

// Proportions for every side in one pass; sides must be strictly increasing.
inline std::vector<double> autocontour_all_sides(const std::vector<double>& residuals,
                                                 const std::vector<double>& sqrt_sides,
                                                 int lag) {
  const std::size_t ns = sqrt_sides.size();
  std::vector<std::size_t> bucket(ns + 1, 0);
  for (std::size_t t = std::size_t(lag); t < residuals.size(); ++t) {
    double m = std::max(residuals[t], residuals[t - lag]);
    std::size_t lo = 0, hi = ns;
    while (lo < hi) {
      std::size_t mid = (lo + hi) / 2;
      if (sqrt_sides[mid] >= m)
        hi = mid;
      else
        lo = mid + 1;
    }
    ++bucket[lo];
  }
  std::vector<double> props(ns);
  const double denom = double(residuals.size() - std::size_t(lag));
  std::size_t cum = 0;
  for (std::size_t i = 0; i < ns; ++i) {
    cum += bucket[i];
    props[i] = double(cum) / denom;
  }
  return props;
}

inline void check_sides(const std::vector<double>& sides) {
  if (sides.empty()) raise(errc::config_error, "no contour sides given");
  for (std::size_t i = 0; i < sides.size(); ++i) {
    if (!(sides[i] > 0.0 && sides[i] <= 1.0))
      raise(errc::config_error, "sides must lie in (0,1]");
    if (i > 0 && sides[i] <= sides[i - 1])
      raise(errc::config_error, "sides must be strictly increasing");
  }
}

inline std::vector<double> sqrts(const std::vector<double>& v) {
  std::vector<double> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(std::sqrt(x));
  return out;
}

inline double quadratic_form_or_throw(const Eigen::VectorXd& diff,
                                      const Eigen::MatrixXd& cov) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
  const auto& ev = es.eigenvalues();
  double max_ev = ev.maxCoeff();
  if (!(max_ev > 0.0) || ev.minCoeff() <= 1e-12 * std::max(1e-30, max_ev))
    raise(errc::singular_covariance, "autocontour null covariance is singular");
  Eigen::VectorXd q = es.eigenvectors().transpose() * diff;
  double stat = 0.0;
  for (Eigen::Index i = 0; i < q.size(); ++i) stat += q[i] * q[i] / ev[i];
  return stat;
}

}  // namespace detail

/// Finite-sample null covariance of the contour-aggregated proportion vector,
/// estimated from seeded iid U[0,1] simulations of the same length.
inline Eigen::MatrixXd contour_null_covariance(const std::vector<double>& sides, int lag,
                                               std::size_t series_len,
                                               int n_sims = default_grs_sims,
                                               std::uint64_t seed = 1) {
  detail::check_sides(sides);
  if (series_len <= std::size_t(lag))
    raise(errc::insufficient_data, "series length must exceed lag");
  const auto ss = detail::sqrts(sides);
  const Eigen::Index d = Eigen::Index(sides.size());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd draws(n_sims, d);
  std::vector<double> eps(series_len);
  for (int s = 0; s < n_sims; ++s) {
    for (auto& e : eps) e = unif(rng);
    auto props = detail::autocontour_all_sides(eps, ss, lag);
    for (Eigen::Index i = 0; i < d; ++i) draws(s, i) = props[i];
  }
  Eigen::RowVectorXd mean = draws.colwise().mean();
  Eigen::MatrixXd centered = draws.rowwise() - mean;
  return centered.transpose() * centered / double(n_sims - 1);
}

/// Same for the lag-aggregated proportion vector at a fixed side.
inline Eigen::MatrixXd lag_null_covariance(double side, int max_lag,
                                           std::size_t series_len,
                                           int n_sims = default_grs_sims,
                                           std::uint64_t seed = 1) {
  if (max_lag < 1) raise(errc::domain_error, "max lag must be >= 1");
  if (series_len <= std::size_t(max_lag))
    raise(errc::insufficient_data, "series length must exceed max lag");
  detail::check_sides({side});
  const double s = std::sqrt(side);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Eigen::MatrixXd draws(n_sims, max_lag);
  std::vector<double> eps(series_len);
  for (int sim = 0; sim < n_sims; ++sim) {
    for (auto& e : eps) e = unif(rng);
    for (int l = 1; l <= max_lag; ++l) {
      std::size_t count = 0;
      for (std::size_t t = std::size_t(l); t < eps.size(); ++t)
        if (eps[t] <= s && eps[t - l] <= s) ++count;
      draws(sim, l - 1) = double(count) / double(eps.size() - std::size_t(l));
    }
  }
  Eigen::RowVectorXd mean = draws.colwise().mean();
  Eigen::MatrixXd centered = draws.rowwise() - mean;
  return centered.transpose() * centered / double(n_sims - 1);
}

/// Contour-aggregated test with a caller-supplied null covariance.
inline GrsResult grs_contour_test_with_cov(const std::vector<double>& residuals,
                                           const std::vector<double>& sides, int lag,
                                           const Eigen::MatrixXd& cov) {
  detail::check_sides(sides);
  if (residuals.size() <= std::size_t(lag))
    raise(errc::insufficient_data, "residual series shorter than lag");
  auto props = detail::autocontour_all_sides(residuals, detail::sqrts(sides), lag);
  Eigen::VectorXd diff(Eigen::Index(sides.size()));
  for (std::size_t i = 0; i < sides.size(); ++i) diff[Eigen::Index(i)] = props[i] - sides[i];

  GrsResult res;
  res.variant = "contour_agg";
  res.sides = sides;
  res.lag = lag;
  res.dof = int(sides.size());
  res.statistic = detail::quadratic_form_or_throw(diff, cov);
  res.p_value = chi2_upper_tail(res.statistic, res.dof);
  return res;
}

/// Contour-aggregated test; the null covariance is simulated internally.
inline GrsResult grs_contour_test(const std::vector<double>& residuals,
                                  const std::vector<double>& sides, int lag = 1,
                                  int n_sims = default_grs_sims, std::uint64_t seed = 1) {
  auto cov = contour_null_covariance(sides, lag, residuals.size(), n_sims, seed);
  return grs_contour_test_with_cov(residuals, sides, lag, cov);
}

/// Lag-aggregated test with a caller-supplied null covariance.
inline GrsResult grs_lag_test_with_cov(const std::vector<double>& residuals, double side,
                                       int max_lag, const Eigen::MatrixXd& cov) {
  if (residuals.size() <= std::size_t(max_lag))
    raise(errc::insufficient_data, "residual series shorter than max lag");
  Eigen::VectorXd diff(max_lag);
  for (int l = 1; l <= max_lag; ++l)
    diff[l - 1] = autocontour_proportion(residuals, side, l) - side;

  GrsResult res;
  res.variant = "lag_agg";
  res.sides = {side};
  res.max_lag = max_lag;
  res.dof = max_lag;
  res.statistic = detail::quadratic_form_or_throw(diff, cov);
  res.p_value = chi2_upper_tail(res.statistic, res.dof);
  return res;
}

/// Lag-aggregated test; the null covariance is simulated internally.
inline GrsResult grs_lag_test(const std::vector<double>& residuals, double side,
                              int max_lag, int n_sims = default_grs_sims,
                              std::uint64_t seed = 1) {
  auto cov = lag_null_covariance(side, max_lag, residuals.size(), n_sims, seed);
  return grs_lag_test_with_cov(residuals, side, max_lag, cov);
}

/// Brier score of one forecast: minus the squared deviation of the realized
/// bin indicator from the forecast bin probabilities (larger is better).
inline double brier_score(const DistForecast& fc, double realized) {
  const std::size_t p = fc.cdf_values.size();
  const std::size_t b = bin_index(fc.partition.cutoffs, realized);
  double score = 0.0;
  for (std::size_t j = 1; j <= p + 1; ++j) {
    double lo = j == 1 ? 0.0 : fc.cdf_values[j - 2];
    double hi = j == p + 1 ? 1.0 : fc.cdf_values[j - 1];
    double dev = (j == b ? 1.0 : 0.0) - (hi - lo);
    score -= dev * dev;
  }
  return score;
}

/// CRPS of one forecast: minus the integrated squared distance between the
/// interpolated CDF and the realized step function over [lo, hi], computed
/// with n-node Gauss-Chebyshev quadrature. The weight function is undone by
/// multiplying the integrand with sqrt(1-x^2) after the affine map to [-1,1].
inline double crps(const MonotoneInterpolator& cdf, double realized, int nodes,
                   double lo, double hi) {
  if (!(hi > lo)) raise(errc::range_error, "integration range is empty");
  if (nodes < 1) raise(errc::domain_error, "need at least one quadrature node");
  const double pi = 3.14159265358979323846;
  double sum = 0.0;
  for (int i = 1; i <= nodes; ++i) {
    double theta = (2.0 * i - 1.0) * pi / (2.0 * nodes);
    double x = std::cos(theta);
    double r = lo + (hi - lo) * 0.5 * (x + 1.0);
    double v = cdf(r) - (realized <= r ? 1.0 : 0.0);
    sum += v * v * std::sin(theta);
  }
  return -(pi / nodes) * 0.5 * (hi - lo) * sum;
}

inline double crps(const MonotoneInterpolator& cdf, double realized, int nodes = 300) {
  return crps(cdf, realized, nodes, cdf.min_x(), cdf.max_x());
}

/// Bayesian information criterion: -2 loglik + K ln(n).
inline double bic(double loglik, std::size_t n_params, std::size_t n_obs) {
  if (n_obs < n_params)
    raise(errc::insufficient_data, "BIC needs n_obs >= n_params");
  return -2.0 * loglik + double(n_params) * std::log(double(n_obs));
}

/// Per-date scores plus their means; both scores are nonpositive by
/// construction and larger values are preferred.
struct ScoreReport {
  double mean_brier = 0.0;
  double mean_crps = 0.0;
  std::vector<double> brier;
  std::vector<double> crps_values;
};

inline ScoreReport score_forecasts(const std::vector<DistForecast>& forecasts,
                                   const std::vector<double>& realized, double r_min,
                                   double r_max, int crps_nodes = 300) {
  if (forecasts.size() != realized.size())
    raise(errc::alignment_error, "forecasts/realized length mismatch");
  if (forecasts.empty()) raise(errc::insufficient_data, "no forecasts to score");
  ScoreReport rep;
  rep.brier.reserve(forecasts.size());
  rep.crps_values.reserve(forecasts.size());
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    rep.brier.push_back(brier_score(forecasts[i], realized[i]));
    auto interp = forecast_interpolator(forecasts[i], r_min, r_max);
    rep.crps_values.push_back(crps(interp, realized[i], crps_nodes));
  }
  for (double v : rep.brier) rep.mean_brier += v;
  for (double v : rep.crps_values) rep.mean_crps += v;
  rep.mean_brier /= double(rep.brier.size());
  rep.mean_crps /= double(rep.crps_values.size());
  return rep;
}

/// Flat evaluation report: the four autocontour test variants plus the two
/// scores. Fields are empty until filled so reports serialize with explicit
/// nulls.
struct EvalReport {
  std::optional<double> grs_contour_stat, grs_contour_p;
  std::optional<double> grs_contour_full_stat, grs_contour_full_p;
  std::optional<double> grs_lag_l3_stat, grs_lag_l3_p;
  std::optional<double> grs_lag_l10_stat, grs_lag_l10_p;
  std::optional<double> mean_brier, mean_crps;
  std::optional<double> n_forecasts;

  bool operator==(const EvalReport&) const = default;
};

/// Standard evaluation: contour-aggregated at lag 1 with sides
/// (0.25,0.5,0.75) and with the full grid, lag-aggregated at side 0.5 with
/// L=3 and L=10, plus mean Brier and mean CRPS.
inline EvalReport evaluate_forecasts(const std::vector<DistForecast>& forecasts,
                                     const std::vector<double>& realized, double r_min,
                                     double r_max, int grs_sims = default_grs_sims,
                                     std::uint64_t seed = 1, int crps_nodes = 300) {
  if (forecasts.empty()) raise(errc::insufficient_data, "no forecasts to evaluate");
  std::vector<double> eps;
  {
    std::vector<Date> dates;
    for (const auto& f : forecasts) dates.push_back(f.date);
    eps = residual_values(generalized_residuals(forecasts, dates, realized, r_min, r_max));
  }

  EvalReport rep;
  auto c3 = grs_contour_test(eps, {0.25, 0.5, 0.75}, 1, grs_sims, seed);
  rep.grs_contour_stat = c3.statistic;
  rep.grs_contour_p = c3.p_value;

  auto cf = grs_contour_test(eps, forecasts.front().partition.alphas, 1, grs_sims, seed + 1);
  rep.grs_contour_full_stat = cf.statistic;
  rep.grs_contour_full_p = cf.p_value;

  auto l3 = grs_lag_test(eps, 0.5, 3, grs_sims, seed + 2);
  rep.grs_lag_l3_stat = l3.statistic;
  rep.grs_lag_l3_p = l3.p_value;

  auto l10 = grs_lag_test(eps, 0.5, 10, grs_sims, seed + 3);
  rep.grs_lag_l10_stat = l10.statistic;
  rep.grs_lag_l10_p = l10.p_value;

  auto scores = score_forecasts(forecasts, realized, r_min, r_max, crps_nodes);
  rep.mean_brier = scores.mean_brier;
  rep.mean_crps = scores.mean_crps;
  rep.n_forecasts = double(forecasts.size());
  return rep;
}

}  // namespace distcast
