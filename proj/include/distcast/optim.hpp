// optim.hpp -- dense BFGS minimizer with backtracking line search.
#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "distcast/errors.hpp"

namespace distcast {

struct OptimOptions {
  double grad_tol = 1e-6;       // infinity norm
  double rel_f_tol = 1e-10;     // relative change of objective
  int max_iterations = 1000;
};

struct OptimResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // objective after each accepted step
};

/// Minimizes f(x) given value+gradient. Inverse-Hessian BFGS updates with
/// Armijo backtracking; the approximation resets to (scaled) identity when a
/// direction fails to descend.
inline OptimResult bfgs_minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& fn,
    Eigen::VectorXd x0, const OptimOptions& opt = {}) {
  const Eigen::Index n = x0.size();
  OptimResult res;
  res.x = std::move(x0);

  Eigen::VectorXd g(n), g_new(n);
  double f = fn(res.x, g);
  if (!std::isfinite(f)) raise(errc::non_convergence, "objective not finite at start");
  res.trace.push_back(f);

  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  int iter = 0;
  for (; iter < opt.max_iterations; ++iter) {
    double gnorm = g.lpNorm<Eigen::Infinity>();
    if (gnorm <= opt.grad_tol) {
      res.converged = true;
      break;
    }

    Eigen::VectorXd d = -(hinv * g);
    double slope = d.dot(g);
    if (!d.allFinite() || slope >= 0.0) {
      hinv.setIdentity();
      scaled = false;
      d = -g;
      slope = d.dot(g);
    }

    double alpha = 1.0;
    double f_new = f;
    Eigen::VectorXd x_new;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = res.x + alpha * d;
      f_new = fn(x_new, g_new);
      if (std::isfinite(f_new) && f_new <= f + 1e-4 * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      // No descent along d at machine-reachable step sizes; retry once from
      // steepest descent before giving up.
      if (!scaled && hinv.isIdentity(0.0)) break;
      hinv.setIdentity();
      scaled = false;
      continue;
    }

    Eigen::VectorXd s = x_new - res.x;
    Eigen::VectorXd y = g_new - g;
    double sy = s.dot(y);

    double f_prev = f;
    res.x = x_new;
    f = f_new;
    g = g_new;
    res.trace.push_back(f);

    if (std::fabs(f_prev - f) <= opt.rel_f_tol * (std::fabs(f) + 1.0)) {
      res.converged = true;
      ++iter;
      break;
    }

    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      Eigen::VectorXd hy = hinv * y;
      double yhy = y.dot(hy);
      double rho = 1.0 / sy;
      // Sherman-Morrison form of the BFGS inverse update.
      hinv += (sy + yhy) * rho * rho * (s * s.transpose());
      hinv -= rho * (hy * s.transpose() + s * hy.transpose());
    }
  }

  res.f = f;
  res.iterations = iter;
  res.grad_norm = g.lpNorm<Eigen::Infinity>();
  if (res.grad_norm <= opt.grad_tol) res.converged = true;
  return res;
}

}  // namespace distcast
