// partition.hpp -- probability grid and volatility-scaled cutoff vectors.
#pragma once

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "distcast/errors.hpp"
#include "distcast/stats.hpp"

namespace distcast {

/// Strictly increasing probability levels in (0,1).
struct ProbabilityGrid {
  std::vector<double> alphas;

  std::size_t size() const { return alphas.size(); }

  void validate() const {
    if (alphas.empty()) raise(errc::config_error, "empty probability grid");
    for (std::size_t j = 0; j < alphas.size(); ++j) {
      if (!(alphas[j] > 0.0 && alphas[j] < 1.0))
        raise(errc::config_error, "grid levels must lie in (0,1)");
      if (j > 0 && alphas[j] <= alphas[j - 1])
        raise(errc::config_error, "grid levels must be strictly increasing");
    }
  }

  /// Equally spaced levels lo, lo+step, ..., hi (inclusive up to rounding).
  static ProbabilityGrid equally_spaced(double lo, double hi, double step) {
    if (!(step > 0.0) || !(lo < hi))
      raise(errc::config_error, "grid spec requires lo < hi and step > 0");
    ProbabilityGrid g;
    int n = int(std::floor((hi - lo) / step + 0.5)) + 1;
    g.alphas.reserve(n);
    for (int j = 0; j < n; ++j) {
      double a = lo + step * j;
      if (a > hi + 1e-12) break;
      g.alphas.push_back(a);
    }
    g.validate();
    return g;
  }

  /// Presets: p equally spaced levels spanning [0.05, 0.95].
  static ProbabilityGrid preset(int p) {
    if (p < 2) raise(errc::config_error, "grid preset requires p >= 2");
    return equally_spaced(0.05, 0.95, 0.90 / (p - 1));
  }

  static ProbabilityGrid standard() { return preset(37); }
};

/// Parses "lo:hi:step" or "p=N" grid specifications.
inline ProbabilityGrid parse_grid_spec(const std::string& spec) {
  if (spec.rfind("p=", 0) == 0) {
    int p = 0;
    if (std::sscanf(spec.c_str(), "p=%d", &p) != 1)
      raise(errc::config_error, "bad grid spec: " + spec);
    return ProbabilityGrid::preset(p);
  }
  double lo, hi, step;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf", &lo, &hi, &step) != 3)
    raise(errc::config_error, "bad grid spec: " + spec);
  return ProbabilityGrid::equally_spaced(lo, hi, step);
}

/// Probability grid plus the strictly increasing cutoff vector it induces for
/// one variance level. The implicit outer cutoffs are -inf and +inf.
struct Partition {
  std::vector<double> alphas;
  std::vector<double> cutoffs;
  double sigma2 = 0.0;

  std::size_t size() const { return cutoffs.size(); }
};

/// c_j = normal_quantile(alpha_j) * sqrt(sigma2).
inline Partition build_partition(const ProbabilityGrid& grid, double sigma2) {
  grid.validate();
  if (!(sigma2 > 0.0))
    raise(errc::non_positive_variance, "partition requires sigma2 > 0");
  Partition part;
  part.alphas = grid.alphas;
  part.sigma2 = sigma2;
  const double sigma = std::sqrt(sigma2);
  part.cutoffs.reserve(grid.size());
  for (double a : grid.alphas) part.cutoffs.push_back(normal_quantile(a) * sigma);
  return part;
}

/// Partition with caller-supplied cutoffs (fixed-partition studies).
inline Partition fixed_partition(const ProbabilityGrid& grid, std::vector<double> cutoffs,
                                 double sigma2 = 1.0) {
  grid.validate();
  if (cutoffs.size() != grid.size())
    raise(errc::config_error, "cutoff count must match grid size");
  for (std::size_t j = 1; j < cutoffs.size(); ++j)
    if (cutoffs[j] <= cutoffs[j - 1])
      raise(errc::config_error, "cutoffs must be strictly increasing");
  Partition part;
  part.alphas = grid.alphas;
  part.cutoffs = std::move(cutoffs);
  part.sigma2 = sigma2;
  return part;
}

}  // namespace distcast
