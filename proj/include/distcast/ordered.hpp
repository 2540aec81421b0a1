// ordered.hpp -- ordered binary choice model with polynomial cross-threshold
// slope restrictions: likelihood, three-step fitting, and CDF prediction with
// monotonic adjustment.
#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "distcast/errors.hpp"
#include "distcast/logit.hpp"
#include "distcast/optim.hpp"
#include "distcast/partition.hpp"
#include "distcast/predictors.hpp"
#include "distcast/series.hpp"

namespace distcast {

/// Polynomial orders of the per-predictor slope functions.
struct PolynomialSpec {
  std::vector<int> orders;

  std::size_t k() const { return orders.size(); }
  int total_order() const {
    int q = 0;
    for (int o : orders) q += o;
    return q;
  }
  void validate_for(std::size_t p) const {
    if (orders.empty()) raise(errc::config_error, "polynomial spec has no predictors");
    for (int o : orders) {
      if (o < 0) raise(errc::config_error, "polynomial order must be >= 0");
      if (std::size_t(o) + 1 > p)
        raise(errc::rank_deficient_basis,
              "order " + std::to_string(o) + " needs more than p=" + std::to_string(p) +
                  " thresholds");
    }
  }
};

/// Basis value 2^i (alpha-1/2)^i; i = 0 gives the constant term.
inline double slope_basis(int i, double alpha) {
  return i == 0 ? 1.0 : std::pow(2.0 * (alpha - 0.5), i);
}

/// Slope polynomial evaluated at a probability level.
inline double slope_at(const std::vector<double>& coeffs, double alpha) {
  double u = 2.0 * (alpha - 0.5);
  double value = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 0;) value = value * u + coeffs[i];
  return value;
}

/// p threshold intercepts plus one slope polynomial per predictor.
struct OrderedModelParams {
  std::vector<double> intercepts;
  std::vector<std::vector<double>> slope_coeffs;  // k rows, orders[l]+1 each
  PolynomialSpec spec;

  std::size_t p() const { return intercepts.size(); }
  std::size_t k() const { return slope_coeffs.size(); }
  std::size_t parameter_count() const {
    std::size_t n = intercepts.size();
    for (const auto& c : slope_coeffs) n += c.size();
    return n;
  }
};

/// (K_O, K_UO): parameter counts of the restricted and unrestricted models.
inline std::pair<std::size_t, std::size_t> count_parameters(std::size_t p, std::size_t k,
                                                            const PolynomialSpec& spec) {
  if (spec.k() != k) raise(errc::config_error, "spec size must equal predictor count");
  spec.validate_for(p);
  std::size_t K_O = p + k + std::size_t(spec.total_order());
  std::size_t K_UO = (1 + k) * p;
  return {K_O, K_UO};
}

/// Linear index driving the link at threshold j (0-based).
inline double linear_predictor(const OrderedModelParams& params, const PredictorRow& x,
                               std::size_t j, double alpha_j) {
  double theta = params.intercepts[j];
  if (params.k() > 0) theta += x.indicator * slope_at(params.slope_coeffs[0], alpha_j);
  if (params.k() > 1) theta += x.volproxy * slope_at(params.slope_coeffs[1], alpha_j);
  return theta;
}

/// Conditional CDF forecast at the partition cutoffs for one date, after
/// monotonic adjustment: consecutive differences are at least `floor`.
struct DistForecast {
  Date date{};
  Partition partition;
  std::vector<double> cdf_values;
  int adjusted_count = 0;
};

/// Enforces increasing CDF values with margin `floor`; returns the number of
/// upward shifts applied.
inline int repair_monotone(std::vector<double>& cdf, double floor_eps) {
  int adjusted = 0;
  for (std::size_t j = 1; j < cdf.size(); ++j) {
    if (cdf[j] < cdf[j - 1] + floor_eps) {
      cdf[j] = cdf[j - 1] + floor_eps;
      ++adjusted;
    }
  }
  // Rare overflow past 1 after repairs near the top: cap from above while
  // preserving the floor between neighbours.
  if (!cdf.empty() && cdf.back() >= 1.0) {
    cdf.back() = 1.0 - floor_eps;
    for (std::size_t j = cdf.size() - 1; j-- > 0;)
      if (cdf[j] > cdf[j + 1] - floor_eps) cdf[j] = cdf[j + 1] - floor_eps;
  }
  return adjusted;
}

/// CDF forecast from fitted parameters and one date's predictor rows.
inline DistForecast predict_cdf(const OrderedModelParams& params,
                                const std::vector<PredictorRow>& x, const Partition& part,
                                double floor_eps = 1e-6, Date date = {}) {
  if (x.size() != part.size())
    raise(errc::alignment_error, "predictor rows must match partition size");
  DistForecast fc;
  fc.date = date;
  fc.partition = part;
  fc.cdf_values.resize(part.size());
  for (std::size_t j = 0; j < part.size(); ++j)
    fc.cdf_values[j] = logit_link(linear_predictor(params, x[j], j, part.alphas[j]));
  fc.adjusted_count = repair_monotone(fc.cdf_values, floor_eps);
  return fc;
}

/// Forecast from the unrestricted separate-logit fits, repaired the same way.
inline DistForecast predict_cdf_separate(const SeparateLogitParams& params,
                                         const std::vector<PredictorRow>& x,
                                         const Partition& part, double floor_eps = 1e-6,
                                         Date date = {}) {
  if (x.size() != part.size() || params.p() != part.size())
    raise(errc::alignment_error, "predictor rows must match partition size");
  DistForecast fc;
  fc.date = date;
  fc.partition = part;
  fc.cdf_values.resize(part.size());
  for (std::size_t j = 0; j < part.size(); ++j) {
    double u = params.intercepts[j] + params.slopes[j][0] * x[j].indicator +
               (params.k() > 1 ? params.slopes[j][1] * x[j].volproxy : 0.0);
    fc.cdf_values[j] = logit_link(u);
  }
  fc.adjusted_count = repair_monotone(fc.cdf_values, floor_eps);
  return fc;
}

namespace detail {

/// Precomputed window data shared by likelihood, gradient and fitting.
struct OrderedFitData {
  std::size_t p = 0, k = 0, n = 0;
  PredictorPanel panel;
  std::vector<int> bins;                     // per target, 1..p+1
  std::vector<double> alphas;
  std::vector<std::vector<double>> basis;    // per l: p x (orders[l]+1), row-major
  std::vector<int> coeff_offset;             // flat offset of each slope block
  std::size_t n_params = 0;
  std::vector<char> bin_occupied;            // bins 1..p+1 -> index 0..p
  double floor_eps = 1e-6;

  static OrderedFitData build(const std::vector<double>& returns,
                              const std::vector<Partition>& partitions,
                              const PolynomialSpec& spec, double floor_eps) {
    if (returns.size() < 2) raise(errc::empty_series, "window needs >= 2 returns");
    const bool shared = partitions.size() == 1;
    if (!shared && partitions.size() != returns.size())
      raise(errc::alignment_error, "partitions must be shared or per-day");

    OrderedFitData d;
    d.p = partitions.front().size();
    d.k = spec.k();
    d.floor_eps = floor_eps;
    spec.validate_for(d.p);
    d.alphas = partitions.front().alphas;
    d.panel = build_predictors(returns, partitions);
    d.n = d.panel.n_obs();

    d.bins.resize(d.n);
    d.bin_occupied.assign(d.p + 1, 0);
    for (std::size_t t = 0; t < d.n; ++t) {
      const Partition& part = shared ? partitions.front() : partitions[t + 1];
      d.bins[t] = int(bin_index(part.cutoffs, returns[t + 1]));
      d.bin_occupied[d.bins[t] - 1] = 1;
    }

    d.coeff_offset.resize(d.k);
    std::size_t off = d.p;
    for (std::size_t l = 0; l < d.k; ++l) {
      d.coeff_offset[l] = int(off);
      off += std::size_t(spec.orders[l]) + 1;
    }
    d.n_params = off;

    d.basis.resize(d.k);
    for (std::size_t l = 0; l < d.k; ++l) {
      const int m = spec.orders[l] + 1;
      d.basis[l].resize(d.p * m);
      for (std::size_t j = 0; j < d.p; ++j)
        for (int i = 0; i < m; ++i) d.basis[l][j * m + i] = slope_basis(i, d.alphas[j]);
    }
    return d;
  }
};

struct LoglikResult {
  double loglik = 0.0;
  long clamp_count = 0;
  long total_diffs = 0;
};

/// Joint ordered log-likelihood over the window. Every consecutive link
/// difference is floored at eps before logging; all p+1 differences per
/// observation are inspected for the clamp count. Optionally accumulates the
/// analytic gradient and per-observation gradient rows (for OPG).
inline LoglikResult ordered_loglik_core(const OrderedFitData& d, const double* phi,
                                        double* grad, Eigen::MatrixXd* per_obs_grad) {
  const std::size_t p = d.p;
  LoglikResult out;
  out.total_diffs = long(d.n) * long(p + 1);

  // Slope values per (predictor, threshold) for the current parameters.
  std::vector<double> slope_val(d.k * p);
  for (std::size_t l = 0; l < d.k; ++l) {
    const int m = int(d.basis[l].size() / p);
    for (std::size_t j = 0; j < p; ++j) {
      double v = 0.0;
      for (int i = 0; i < m; ++i) v += d.basis[l][j * m + i] * phi[d.coeff_offset[l] + i];
      slope_val[l * p + j] = v;
    }
  }

  if (grad)
    for (std::size_t i = 0; i < d.n_params; ++i) grad[i] = 0.0;

  std::vector<double> lam(p);
  for (std::size_t t = 0; t < d.n; ++t) {
    for (std::size_t j = 0; j < p; ++j) {
      double theta = phi[j];
      for (std::size_t l = 0; l < d.k; ++l)
        theta += d.panel.at(t, j, l) * slope_val[l * p + j];
      lam[j] = logit_link(theta);
    }

    const int b = d.bins[t];
    double diff_b = 0.0;
    for (std::size_t j = 0; j <= p; ++j) {
      double lo = j == 0 ? 0.0 : lam[j - 1];
      double hi = j == p ? 1.0 : lam[j];
      double diff = hi - lo;
      if (diff < d.floor_eps) ++out.clamp_count;
      if (int(j) + 1 == b) diff_b = diff;
    }

    const bool clamped = diff_b < d.floor_eps;
    out.loglik += std::log(clamped ? d.floor_eps : diff_b);

    if (grad && !clamped) {
      auto scatter = [&](std::size_t j, double w) {
        grad[j] += w;
        for (std::size_t l = 0; l < d.k; ++l) {
          const double xw = w * d.panel.at(t, j, l);
          const int m = int(d.basis[l].size() / p);
          for (int i = 0; i < m; ++i) {
            double gi = xw * d.basis[l][j * m + i];
            grad[d.coeff_offset[l] + i] += gi;
            if (per_obs_grad) (*per_obs_grad)(t, d.coeff_offset[l] + i) += gi;
          }
        }
        if (per_obs_grad) (*per_obs_grad)(t, j) += w;
      };
      if (b <= int(p)) {
        double w = lam[b - 1] * (1.0 - lam[b - 1]) / diff_b;
        scatter(std::size_t(b - 1), w);
      }
      if (b >= 2) {
        double w = -lam[b - 2] * (1.0 - lam[b - 2]) / diff_b;
        scatter(std::size_t(b - 2), w);
      }
    }
  }
  return out;
}

inline Eigen::VectorXd pack_params(const OrderedModelParams& params) {
  Eigen::VectorXd phi(params.parameter_count());
  std::size_t off = 0;
  for (double v : params.intercepts) phi[off++] = v;
  for (const auto& c : params.slope_coeffs)
    for (double v : c) phi[off++] = v;
  return phi;
}

inline OrderedModelParams unpack_params(const Eigen::VectorXd& phi, std::size_t p,
                                        const PolynomialSpec& spec) {
  OrderedModelParams params;
  params.spec = spec;
  params.intercepts.assign(phi.data(), phi.data() + p);
  std::size_t off = p;
  for (int o : spec.orders) {
    params.slope_coeffs.emplace_back(phi.data() + off, phi.data() + off + o + 1);
    off += std::size_t(o) + 1;
  }
  return params;
}

}  // namespace detail

/// Total ordered log-likelihood of a window plus the number of floored
/// differences, counted across all p+1 differences of every observation.
inline std::pair<double, long> ordered_loglik(const OrderedModelParams& params,
                                              const std::vector<double>& returns,
                                              const std::vector<Partition>& partitions,
                                              double floor_eps = 1e-6) {
  auto data = detail::OrderedFitData::build(returns, partitions, params.spec, floor_eps);
  if (params.p() != data.p)
    raise(errc::alignment_error, "parameter dimension does not match partition");
  Eigen::VectorXd phi = detail::pack_params(params);
  auto res = detail::ordered_loglik_core(data, phi.data(), nullptr, nullptr);
  return {res.loglik, res.clamp_count};
}

/// Step 2: least squares of the p separate-fit slopes on the polynomial basis,
/// one regression per predictor.
inline std::vector<std::vector<double>> init_slope_coeffs(
    const SeparateLogitParams& step1, const std::vector<double>& alphas,
    const PolynomialSpec& spec) {
  const std::size_t p = step1.p();
  if (alphas.size() != p) raise(errc::alignment_error, "alpha grid does not match fits");
  if (spec.k() != step1.k())
    raise(errc::config_error, "spec predictor count does not match step-1 fits");
  spec.validate_for(p);

  std::vector<std::vector<double>> coeffs(spec.k());
  for (std::size_t l = 0; l < spec.k(); ++l) {
    const int m = spec.orders[l] + 1;
    Eigen::MatrixXd X(p, m);
    Eigen::VectorXd y(p);
    for (std::size_t j = 0; j < p; ++j) {
      y[j] = step1.slopes[j][l];
      for (int i = 0; i < m; ++i) X(j, i) = slope_basis(i, alphas[j]);
    }
    Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
    coeffs[l].assign(beta.data(), beta.data() + m);
  }
  return coeffs;
}

struct OrderedFitOptions {
  double floor_eps = 1e-6;
  double grad_tol = 1e-6;
  double rel_f_tol = 1e-10;
  int max_iterations = 600;
  bool with_se = true;
  double empty_bin_ridge = 1e-6;
};

struct FitDiagnostics {
  double loglik = 0.0;
  double step2_loglik = 0.0;   // objective at the step-2 starting point
  long clamp_count = 0;
  long total_diffs = 0;
  int iterations = 0;
  double grad_norm = 0.0;
  std::vector<std::string> warnings;
  std::vector<double> loglik_trace;
};

struct OrderedFit {
  OrderedModelParams params;
  std::vector<double> intercept_se;
  std::vector<std::vector<double>> slope_coeff_se;
  FitDiagnostics diag;
  SeparateLogitParams step1;
};

/// Three-step maximum likelihood fit: separate logits per threshold, least
/// squares projection of their slopes onto the polynomial basis, then joint
/// quasi-Newton maximization from those starting values. Intercepts of bins
/// with no in-window occupants are tied to their step-1 values by a weak
/// ridge so they cannot drift.
inline OrderedFit fit_ordered(const std::vector<double>& returns,
                              const std::vector<Partition>& partitions,
                              const PolynomialSpec& spec,
                              const OrderedFitOptions& opt = {}) {
  auto data = detail::OrderedFitData::build(returns, partitions, spec, opt.floor_eps);

  OrderedFit fit;
  fit.step1 = fit_separate_model(returns, partitions, /*with_se=*/false);
  auto start_coeffs = init_slope_coeffs(fit.step1, data.alphas, spec);

  for (std::size_t j = 0; j < data.p; ++j)
    if (!data.bin_occupied[j])
      fit.diag.warnings.push_back("bin " + std::to_string(j + 1) +
                                  " has no in-window observations");

  OrderedModelParams start;
  start.intercepts = fit.step1.intercepts;
  start.slope_coeffs = std::move(start_coeffs);
  start.spec = spec;
  Eigen::VectorXd phi0 = detail::pack_params(start);

  const std::vector<double>& ridge_center = fit.step1.intercepts;
  auto objective = [&](const Eigen::VectorXd& phi, Eigen::VectorXd& grad) -> double {
    grad.resize(Eigen::Index(data.n_params));
    auto res = detail::ordered_loglik_core(data, phi.data(), grad.data(), nullptr);
    double penalty = 0.0;
    for (std::size_t j = 0; j < data.p; ++j) {
      if (!data.bin_occupied[j]) {
        double dev = phi[Eigen::Index(j)] - ridge_center[j];
        penalty += opt.empty_bin_ridge * dev * dev;
        grad[Eigen::Index(j)] -= 2.0 * opt.empty_bin_ridge * dev;
      }
    }
    grad = -grad;
    return -(res.loglik - penalty);
  };

  {
    Eigen::VectorXd g0;
    fit.diag.step2_loglik = -objective(phi0, g0);
  }

  OptimOptions oopt;
  oopt.grad_tol = opt.grad_tol;
  oopt.rel_f_tol = opt.rel_f_tol;
  oopt.max_iterations = opt.max_iterations;
  OptimResult best = bfgs_minimize(objective, phi0, oopt);
  if (!best.converged)
    raise(errc::non_convergence,
          "ordered fit: gradient " + std::to_string(best.grad_norm) + " after " +
              std::to_string(best.iterations) + " iterations",
          best.iterations);

  fit.params = detail::unpack_params(best.x, data.p, spec);
  auto ll = detail::ordered_loglik_core(data, best.x.data(), nullptr, nullptr);
  fit.diag.loglik = ll.loglik;
  fit.diag.clamp_count = ll.clamp_count;
  fit.diag.total_diffs = ll.total_diffs;
  fit.diag.iterations = best.iterations;
  fit.diag.grad_norm = best.grad_norm;
  fit.diag.loglik_trace.reserve(best.trace.size());
  for (double v : best.trace) fit.diag.loglik_trace.push_back(-v);

  if (opt.with_se) {
    const std::size_t K = data.n_params;
    Eigen::MatrixXd per_obs = Eigen::MatrixXd::Zero(Eigen::Index(data.n), Eigen::Index(K));
    std::vector<double> gline(K);
    detail::ordered_loglik_core(data, best.x.data(), gline.data(), &per_obs);
    Eigen::MatrixXd opg = per_obs.transpose() * per_obs;

    Eigen::MatrixXd hess(K, K);
    std::vector<double> gp(K), gm(K);
    Eigen::VectorXd x = best.x;
    for (std::size_t i = 0; i < K; ++i) {
      double h = 1e-5 * std::max(1.0, std::fabs(x[Eigen::Index(i)]));
      Eigen::VectorXd xp = x, xm = x;
      xp[Eigen::Index(i)] += h;
      xm[Eigen::Index(i)] -= h;
      detail::ordered_loglik_core(data, xp.data(), gp.data(), nullptr);
      detail::ordered_loglik_core(data, xm.data(), gm.data(), nullptr);
      for (std::size_t r = 0; r < K; ++r) hess(Eigen::Index(r), Eigen::Index(i)) = (gp[r] - gm[r]) / (2.0 * h);
    }
    hess = 0.5 * (hess + hess.transpose()).eval();

    Eigen::MatrixXd hinv = hess.ldlt().solve(Eigen::MatrixXd::Identity(K, K));
    Eigen::MatrixXd cov = hinv * opg * hinv.transpose();
    fit.intercept_se.resize(data.p);
    for (std::size_t j = 0; j < data.p; ++j)
      fit.intercept_se[j] = std::sqrt(std::max(0.0, cov(Eigen::Index(j), Eigen::Index(j))));
    fit.slope_coeff_se.resize(spec.k());
    for (std::size_t l = 0; l < spec.k(); ++l) {
      const int m = spec.orders[l] + 1;
      fit.slope_coeff_se[l].resize(m);
      for (int i = 0; i < m; ++i) {
        Eigen::Index idx = data.coeff_offset[l] + i;
        fit.slope_coeff_se[l][i] = std::sqrt(std::max(0.0, cov(idx, idx)));
      }
    }
  }
  return fit;
}

}  // namespace distcast
