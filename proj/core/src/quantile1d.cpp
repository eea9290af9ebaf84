#include "wbary/quantile1d.hpp"

#include <algorithm>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <string>

#include "wbary/errors.hpp"
#include "wbary/normal.hpp"

namespace wbary {

QuantileGrid::QuantileGrid(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw Error(ErrorCode::InvalidGrid, "quantile grid is empty");
  for (std::size_t j = 0; j < values_.size(); ++j) {
    if (!std::isfinite(values_[j]))
      throw Error(ErrorCode::InvalidGrid, "non-finite quantile at index " + std::to_string(j));
    if (j > 0 && values_[j] < values_[j - 1])
      throw Error(ErrorCode::InvalidGrid, "quantiles decrease at index " + std::to_string(j));
  }
}

double QuantileGrid::quantile(double p) const {
  const std::size_t m = values_.size();
  const double h = p * static_cast<double>(m) - 0.5;
  if (h <= 0.0) return values_.front();
  if (h >= static_cast<double>(m - 1)) return values_.back();
  const auto lo = static_cast<std::size_t>(h);
  const double t = h - static_cast<double>(lo);
  return values_[lo] + t * (values_[lo + 1] - values_[lo]);
}

double QuantileGrid::cdf(double x) const {
  const std::size_t m = values_.size();
  if (x < values_.front()) return 0.0;
  if (x >= values_.back()) return 1.0;
  auto it = std::upper_bound(values_.begin(), values_.end(), x);
  const auto hi = static_cast<std::size_t>(it - values_.begin());
  const std::size_t lo = hi - 1;
  const double t = (x - values_[lo]) / (values_[hi] - values_[lo]);
  return (static_cast<double>(lo) + 0.5 + t) / static_cast<double>(m);
}

double QuantileGrid::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

double QuantileGrid::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (double v : values_) s += (v - mu) * (v - mu);
  return s / static_cast<double>(values_.size());
}

namespace quantile1d {
namespace {

void require_same_size(const QuantileGrid& a, const QuantileGrid& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::GridMismatch,
                "grid sizes " + std::to_string(a.size()) + " and " + std::to_string(b.size()));
}

void require_grid_size(std::size_t m) {
  if (m == 0) throw Error(ErrorCode::InvalidGrid, "grid size must be >= 1");
}

void require_step(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidConfig, "step must lie in [0, 1]");
}

}  // namespace

QuantileGrid from_samples(std::span<const double> xs, std::size_t m) {
  if (xs.empty()) throw Error(ErrorCode::EmptySample, "cannot build a quantile grid from no samples");
  require_grid_size(m);
  std::vector<double> sorted(xs.begin(), xs.end());
  std::stable_sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  std::vector<double> q(m);
  for (std::size_t j = 0; j < m; ++j) {
    const double h = QuantileGrid::level(j, m) * static_cast<double>(n) - 0.5;
    if (h <= 0.0) {
      q[j] = sorted.front();
    } else if (h >= static_cast<double>(n - 1)) {
      q[j] = sorted.back();
    } else {
      const auto lo = static_cast<std::size_t>(h);
      const double t = h - static_cast<double>(lo);
      q[j] = sorted[lo] + t * (sorted[lo + 1] - sorted[lo]);
    }
  }
  return QuantileGrid(std::move(q));
}

QuantileGrid from_quantile_function(const std::function<double(double)>& quantile, std::size_t m) {
  require_grid_size(m);
  std::vector<double> q(m);
  for (std::size_t j = 0; j < m; ++j) q[j] = quantile(QuantileGrid::level(j, m));
  return QuantileGrid(std::move(q));
}

QuantileGrid from_gaussian(double mean, double std, std::size_t m) {
  if (!(std > 0.0)) throw Error(ErrorCode::NonpositiveStd, "standard deviation must be > 0");
  return from_quantile_function([&](double p) { return mean + std * normal_quantile(p); }, m);
}

QuantileGrid from_exponential(double rate, std::size_t m) {
  if (!(rate > 0.0)) throw Error(ErrorCode::InvalidConfig, "rate must be > 0");
  return from_quantile_function([&](double p) { return -std::log1p(-p) / rate; }, m);
}

QuantileGrid from_logistic(double location, double scale, std::size_t m) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "scale must be > 0");
  return from_quantile_function([&](double p) { return location + scale * std::log(p / (1.0 - p)); }, m);
}

QuantileGrid from_gumbel(double location, double scale, std::size_t m) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "scale must be > 0");
  return from_quantile_function([&](double p) { return location - scale * std::log(-std::log(p)); }, m);
}

QuantileGrid from_laplace(double location, double scale, std::size_t m) {
  if (!(scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "scale must be > 0");
  return from_quantile_function(
      [&](double p) {
        return p < 0.5 ? location + scale * std::log(2.0 * p) : location - scale * std::log(2.0 - 2.0 * p);
      },
      m);
}

QuantileGrid from_gamma(double shape, double scale, std::size_t m) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw Error(ErrorCode::InvalidConfig, "shape and scale must be > 0");
  return from_quantile_function([&](double p) { return scale * boost::math::gamma_p_inv(shape, p); }, m);
}

QuantileGrid point_mass(double x, std::size_t m) {
  require_grid_size(m);
  return QuantileGrid(std::vector<double>(m, x));
}

double w2_sq(const QuantileGrid& a, const QuantileGrid& b) {
  require_same_size(a, b);
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    s += d * d;
  }
  return s / static_cast<double>(a.size());
}

double w2(const QuantileGrid& a, const QuantileGrid& b) { return std::sqrt(w2_sq(a, b)); }

QuantileGrid weighted_step(const QuantileGrid& mu, std::span<const QuantileGrid> atoms,
                           std::span<const double> weights, double gamma) {
  if (atoms.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  if (weights.size() != atoms.size()) throw Error(ErrorCode::InvalidWeights, "one weight per atom expected");
  require_step(gamma);
  for (const auto& a : atoms) require_same_size(mu, a);

  const std::size_t m = mu.size();
  std::vector<double> out(m);
  for (std::size_t j = 0; j < m; ++j) {
    double target = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) target += weights[i] * atoms[i][j];
    out[j] = (1.0 - gamma) * mu[j] + gamma * target;
  }
  return QuantileGrid(std::move(out));
}

QuantileGrid sgd_step(const QuantileGrid& mu, std::span<const QuantileGrid> batch, double gamma) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  const std::vector<double> weights(batch.size(), 1.0 / static_cast<double>(batch.size()));
  return weighted_step(mu, batch, weights, gamma);
}

QuantileGrid exact_barycenter(const FiniteSupport<QuantileGrid>& pi) {
  const std::size_t m = pi.atom(0).size();
  for (const auto& a : pi.atoms()) require_same_size(pi.atom(0), a);
  std::vector<double> out(m, 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) s += pi.weight(i) * pi.atom(i)[j];
    out[j] = s;
  }
  return QuantileGrid(std::move(out));
}

double functional_F(const QuantileGrid& mu, const FiniteSupport<QuantileGrid>& pi) {
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) acc += pi.weight(i) * w2_sq(mu, pi.atom(i));
  return 0.5 * acc;
}

double grad_norm_sq(const QuantileGrid& mu, const FiniteSupport<QuantileGrid>& pi) {
  return w2_sq(mu, exact_barycenter(pi));
}

ShapeReport shape_checks(const QuantileGrid& g, const ShapeOptions& opts) {
  ShapeReport report;
  const std::size_t m = g.size();
  const auto q = g.values();

  double scale = 1.0;
  for (double v : q) scale = std::max(scale, std::abs(v));
  const double centre = q[0] + q[m - 1];
  for (std::size_t j = 0; j < m; ++j)
    report.symmetry_defect = std::max(report.symmetry_defect, std::abs(q[j] + q[m - 1 - j] - centre));
  report.symmetric = report.symmetry_defect <= opts.symmetry_tolerance * scale;

  const double range = q[m - 1] - q[0];
  if (m < 3 || range <= 0.0) {
    report.unimodal = true;
    return report;
  }
  // Spacings are inversely proportional to the density: a unimodal density
  // has no spacing that exceeds both some earlier and some later spacing.
  std::vector<double> gap(m - 1);
  for (std::size_t j = 0; j + 1 < m; ++j) gap[j] = (q[j + 1] - q[j]) / range;
  std::vector<double> suffix_min(gap.size());
  suffix_min.back() = gap.back();
  for (std::size_t j = gap.size() - 1; j-- > 0;) suffix_min[j] = std::min(gap[j], suffix_min[j + 1]);

  report.unimodal = true;
  double prefix_min = gap[0];
  for (std::size_t k = 1; k + 1 < gap.size(); ++k) {
    if (gap[k] > prefix_min + opts.unimodal_tolerance && gap[k] > suffix_min[k + 1] + opts.unimodal_tolerance) {
      report.unimodal = false;
      break;
    }
    prefix_min = std::min(prefix_min, gap[k]);
  }
  return report;
}

}  // namespace quantile1d

QuantileFamily::Tangent QuantileFamily::log_map(const Measure& mu, const Measure& m) const {
  if (mu.size() != m.size()) throw Error(ErrorCode::GridMismatch, "grid sizes differ");
  Tangent d(mu.size());
  for (std::size_t j = 0; j < mu.size(); ++j) d[j] = m[j] - mu[j];
  return d;
}

void QuantileFamily::axpy(Tangent& acc, double a, const Tangent& v) const {
  if (acc.size() != v.size()) throw Error(ErrorCode::GridMismatch, "tangent sizes differ");
  for (std::size_t j = 0; j < acc.size(); ++j) acc[j] += a * v[j];
}

double QuantileFamily::norm_sq(const Measure& mu, const Tangent& v) const {
  if (mu.size() != v.size()) throw Error(ErrorCode::GridMismatch, "tangent size differs from grid");
  double s = 0.0;
  for (double x : v) s += x * x;
  return s / static_cast<double>(v.size());
}

}  // namespace wbary
