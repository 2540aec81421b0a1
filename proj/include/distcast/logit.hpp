// logit.hpp -- logit link and the per-threshold separate binary choice fits.
#pragma once

#include <cfloat>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "distcast/errors.hpp"
#include "distcast/predictors.hpp"

namespace distcast {

/// Logistic link exp(u)/(1+exp(u)), evaluated branch-wise so it neither
/// overflows nor returns an exact 0 or 1.
inline double logit_link(double u) {
  double v;
  if (u >= 0.0) {
    double e = std::exp(-u);
    v = 1.0 / (1.0 + e);
  } else {
    double e = std::exp(u);
    v = e / (1.0 + e);
  }
  if (v <= 0.0) v = DBL_TRUE_MIN;
  if (v >= 1.0) v = 1.0 - DBL_EPSILON / 2.0;
  return v;
}

/// log(logit_link(u)) without cancellation: -softplus(-u).
inline double log_logit(double u) {
  return u >= 0.0 ? -std::log1p(std::exp(-u)) : u - std::log1p(std::exp(u));
}

/// log(1 - logit_link(u)) = -softplus(u).
inline double log_one_minus_logit(double u) { return log_logit(-u); }

/// One threshold's separate-fit coefficients: intercept plus k slopes.
struct BinaryFit {
  double intercept = 0.0;
  std::vector<double> slopes;
  double intercept_se = 0.0;
  std::vector<double> slopes_se;
  double loglik = 0.0;
  int iterations = 0;
  double grad_norm = 0.0;
};

/// Individually fitted binary choice models, one per threshold.
struct SeparateLogitParams {
  std::vector<double> intercepts;
  std::vector<std::vector<double>> slopes;  // p rows of k values
  std::vector<double> intercept_se;
  std::vector<std::vector<double>> slopes_se;
  std::vector<double> logliks;

  std::size_t p() const { return intercepts.size(); }
  std::size_t k() const { return slopes.empty() ? 0 : slopes.front().size(); }
  std::size_t parameter_count() const { return (1 + k()) * p(); }
};

namespace detail {

struct BernoulliDesign {
  const std::vector<char>* y;
  const std::vector<std::vector<double>>* x;  // n rows of k predictors

  std::size_t n() const { return y->size(); }
  std::size_t dim() const { return x->front().size() + 1; }

  double loglik(const Eigen::VectorXd& beta) const {
    double ll = 0.0;
    for (std::size_t t = 0; t < n(); ++t) {
      double u = beta[0];
      for (std::size_t l = 0; l + 1 < std::size_t(beta.size()); ++l)
        u += beta[l + 1] * (*x)[t][l];
      ll += (*y)[t] ? log_logit(u) : log_one_minus_logit(u);
    }
    return ll;
  }

  void grad_hess(const Eigen::VectorXd& beta, Eigen::VectorXd& g, Eigen::MatrixXd& h) const {
    const std::size_t d = dim();
    g.setZero(d);
    h.setZero(d, d);
    Eigen::VectorXd xt(d);
    for (std::size_t t = 0; t < n(); ++t) {
      xt[0] = 1.0;
      for (std::size_t l = 0; l + 1 < d; ++l) xt[l + 1] = (*x)[t][l];
      double u = beta.dot(xt);
      double pr = logit_link(u);
      g += (double((*y)[t]) - pr) * xt;
      h -= pr * (1.0 - pr) * xt * xt.transpose();
    }
  }
};

}  // namespace detail

/// Maximum likelihood fit of one binary logit by damped Newton ascent with a
/// gradient-step fallback when the Hessian solve fails. Standard errors come
/// from the inverse numerical Hessian (central differences of the analytic
/// gradient).
inline BinaryFit fit_separate_logit(const std::vector<char>& targets,
                                    const std::vector<std::vector<double>>& predictors,
                                    double grad_tol = 1e-6, int max_iter = 200,
                                    bool with_se = true) {
  if (targets.empty() || targets.size() != predictors.size())
    raise(errc::alignment_error, "targets/predictors length mismatch");
  std::size_t ones = 0;
  for (char c : targets) ones += c ? 1 : 0;
  if (ones == 0 || ones == targets.size())
    raise(errc::perfect_separation, "targets are all-0 or all-1");

  detail::BernoulliDesign design{&targets, &predictors};
  const std::size_t d = design.dim();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(d);
  beta[0] = std::log(double(ones) / double(targets.size() - ones));

  double f = design.loglik(beta);
  Eigen::VectorXd g(d);
  Eigen::MatrixXd h(d, d);
  double gnorm = 0.0;
  int iter = 0;
  for (; iter < max_iter; ++iter) {
    design.grad_hess(beta, g, h);
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= grad_tol) break;

    // Tiny Levenberg ridge keeps the solve defined when predictors carry no
    // information (singular Hessian); it leaves flat directions untouched.
    Eigen::MatrixXd neg_h = -h;
    double ridge = 1e-12 * std::max(1.0, neg_h.trace());
    neg_h.diagonal().array() += ridge;
    Eigen::VectorXd step = neg_h.ldlt().solve(g);
    if (!step.allFinite() || step.dot(g) <= 0.0) step = g;  // ascent fallback

    double alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      Eigen::VectorXd cand = beta + alpha * step;
      double fc = design.loglik(cand);
      if (std::isfinite(fc) && fc >= f + 1e-4 * alpha * step.dot(g)) {
        beta = cand;
        f = fc;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) break;  // flat to machine precision

    if (beta.lpNorm<Eigen::Infinity>() > 30.0)
      raise(errc::perfect_separation,
            "coefficient magnitude exceeds 30; data are (quasi-)separated");
  }
  if (gnorm > grad_tol) {
    design.grad_hess(beta, g, h);
    gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm > grad_tol)
      raise(errc::non_convergence,
            "separate logit did not converge (grad=" + std::to_string(gnorm) + ")", iter);
  }

  BinaryFit fit;
  fit.intercept = beta[0];
  fit.slopes.assign(beta.data() + 1, beta.data() + d);
  fit.loglik = f;
  fit.iterations = iter;
  fit.grad_norm = gnorm;
  fit.slopes_se.assign(d - 1, 0.0);

  if (with_se) {
    // Numerical Hessian of the loglik via central differences of the gradient.
    Eigen::MatrixXd hn(d, d);
    Eigen::VectorXd gp(d), gm(d);
    Eigen::MatrixXd scratch(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      double hstep = 1e-5 * std::max(1.0, std::fabs(beta[i]));
      Eigen::VectorXd bp = beta, bm = beta;
      bp[i] += hstep;
      bm[i] -= hstep;
      design.grad_hess(bp, gp, scratch);
      design.grad_hess(bm, gm, scratch);
      hn.col(i) = (gp - gm) / (2.0 * hstep);
    }
    hn = 0.5 * (hn + hn.transpose()).eval();
    Eigen::MatrixXd cov = (-hn).ldlt().solve(Eigen::MatrixXd::Identity(d, d));
    fit.intercept_se = std::sqrt(std::max(0.0, cov(0, 0)));
    for (std::size_t l = 1; l < d; ++l)
      fit.slopes_se[l - 1] = std::sqrt(std::max(0.0, cov(l, l)));
  }
  return fit;
}

/// Runs the p independent threshold fits over a predictor panel. Targets for
/// threshold j are 1{r_t <= c_j} with the partition in force at t.
inline SeparateLogitParams fit_separate_model(const std::vector<double>& returns,
                                              const std::vector<Partition>& partitions,
                                              bool with_se = true) {
  const PredictorPanel panel = build_predictors(returns, partitions);
  const bool shared = partitions.size() == 1;
  const std::size_t p = panel.p();
  const std::size_t n = panel.n_obs();

  SeparateLogitParams out;
  out.intercepts.resize(p);
  out.slopes.resize(p);
  out.intercept_se.resize(p);
  out.slopes_se.resize(p);
  out.logliks.resize(p);

  std::vector<char> y(n);
  std::vector<std::vector<double>> x(n, std::vector<double>(panel.k()));
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t t = 0; t < n; ++t) {
      const Partition& part = shared ? partitions.front() : partitions[t + 1];
      y[t] = returns[t + 1] <= part.cutoffs[j] ? 1 : 0;
      for (std::size_t l = 0; l < panel.k(); ++l) x[t][l] = panel.at(t, j, l);
    }
    BinaryFit fit;
    try {
      fit = fit_separate_logit(y, x, 1e-6, 200, with_se);
    } catch (const Error& e) {
      raise(errc::step1_failure,
            "threshold " + std::to_string(j + 1) + ": " + e.what(), long(j + 1));
    }
    out.intercepts[j] = fit.intercept;
    out.slopes[j] = fit.slopes;
    out.intercept_se[j] = fit.intercept_se;
    out.slopes_se[j] = fit.slopes_se;
    out.logliks[j] = fit.loglik;
  }
  return out;
}

}  // namespace distcast
