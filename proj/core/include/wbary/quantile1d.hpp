#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "wbary/population.hpp"

namespace wbary {

// Univariate law stored as its quantile function sampled at the midpoint
// levels p_j = (j + 1/2) / M, j = 0..M-1. Values are finite and nondecreasing.
class QuantileGrid {
 public:
  // Throws Error(InvalidGrid) if empty, non-finite or decreasing.
  explicit QuantileGrid(std::vector<double> values);

  static double level(std::size_t j, std::size_t m) {
    return (static_cast<double>(j) + 0.5) / static_cast<double>(m);
  }

  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t j) const { return values_[j]; }
  double level(std::size_t j) const { return level(j, values_.size()); }

  // Piecewise-linear interpolation through (p_j, q_j), held constant
  // outside [p_0, p_{M-1}].
  double quantile(double p) const;

  // Right-continuous inverse of quantile().
  double cdf(double x) const;

  double mean() const;
  double variance() const;

  friend bool operator==(const QuantileGrid&, const QuantileGrid&) = default;

 private:
  std::vector<double> values_;
};

namespace quantile1d {

inline constexpr std::size_t kDefaultGridSize = 1000;
inline constexpr std::size_t kOracleGridSize = 10000;

// Empirical quantile: sorted sample x_(i) sits at level (i + 1/2)/n and the
// quantile is linearly interpolated between those points (clamped at the ends).
QuantileGrid from_samples(std::span<const double> xs, std::size_t m);

QuantileGrid from_quantile_function(const std::function<double(double)>& quantile, std::size_t m);

QuantileGrid from_gaussian(double mean, double std, std::size_t m);
QuantileGrid from_exponential(double rate, std::size_t m);
QuantileGrid from_logistic(double location, double scale, std::size_t m);
QuantileGrid from_gumbel(double location, double scale, std::size_t m);
QuantileGrid from_laplace(double location, double scale, std::size_t m);
QuantileGrid from_gamma(double shape, double scale, std::size_t m);
QuantileGrid point_mass(double x, std::size_t m);

// sqrt((1/M) sum_j (a_j - b_j)^2). Throws GridMismatch on differing M.
double w2(const QuantileGrid& a, const QuantileGrid& b);
double w2_sq(const QuantileGrid& a, const QuantileGrid& b);

// q_j <- (1 - gamma) q_j + gamma sum_i w_i q_j^{(i)}.
QuantileGrid weighted_step(const QuantileGrid& mu, std::span<const QuantileGrid> atoms,
                           std::span<const double> weights, double gamma);

// Batch step with equal weights 1/S.
QuantileGrid sgd_step(const QuantileGrid& mu, std::span<const QuantileGrid> batch, double gamma);

// Quantile average sum_i lambda_i Q_i.
QuantileGrid exact_barycenter(const FiniteSupport<QuantileGrid>& pi);

double functional_F(const QuantileGrid& mu, const FiniteSupport<QuantileGrid>& pi);

// (1/M) sum_j (q_j - qbar_j)^2 with qbar the exact barycenter.
double grad_norm_sq(const QuantileGrid& mu, const FiniteSupport<QuantileGrid>& pi);

struct ShapeOptions {
  double symmetry_tolerance = 1e-10;
  double unimodal_tolerance = 1e-9;
};

struct ShapeReport {
  bool symmetric = false;
  double symmetry_defect = 0.0;  // max_j |(q_j + q_{M-1-j}) - (q_0 + q_{M-1})|
  bool unimodal = false;
};

// Symmetric iff q_j + q_{M-1-j} is constant (absolute tolerance scaled by
// max(1, max|q|)). Unimodal iff the spacings q_{j+1} - q_j of the normalised
// grid are first nonincreasing then nondecreasing, up to the tolerance.
ShapeReport shape_checks(const QuantileGrid& g, const ShapeOptions& opts = {});

}  // namespace quantile1d

struct QuantileFamily {
  using Measure = QuantileGrid;
  using Tangent = std::vector<double>;
  static constexpr std::string_view kName = "univariate";

  double w2(const Measure& a, const Measure& b) const { return quantile1d::w2(a, b); }
  Tangent log_map(const Measure& mu, const Measure& m) const;
  Tangent zero_tangent(const Measure& mu) const { return Tangent(mu.size(), 0.0); }
  void axpy(Tangent& acc, double a, const Tangent& v) const;
  double norm_sq(const Measure& mu, const Tangent& v) const;
  Measure weighted_step(const Measure& mu, std::span<const Measure> atoms, std::span<const double> weights,
                        double gamma) const {
    return quantile1d::weighted_step(mu, atoms, weights, gamma);
  }
  Measure sgd_step(const Measure& mu, std::span<const Measure> batch, double gamma) const {
    return quantile1d::sgd_step(mu, batch, gamma);
  }
  Measure exact_barycenter(const FiniteSupport<Measure>& pi) const { return quantile1d::exact_barycenter(pi); }
  double functional_F(const Measure& mu, const FiniteSupport<Measure>& pi) const {
    return quantile1d::functional_F(mu, pi);
  }
  double grad_norm_sq(const Measure& mu, const FiniteSupport<Measure>& pi) const {
    return quantile1d::grad_norm_sq(mu, pi);
  }
};

}  // namespace wbary
