#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbary/population.hpp"
#include "wbary/quantile1d.hpp"

namespace wbary {

// A nondecreasing nonnegative radial rescaling alpha, stored in the
// norm-quantile coordinates of the generator: value j is alpha(r_j) where r_j
// is the generator's norm quantile at level (j + 1/2)/M. Equivalently value j
// is the norm quantile of the measure itself, so the calculus is 1D quantile
// calculus on these grids.
class RadialProfile {
 public:
  // Throws InvalidGrid on negative, decreasing or non-finite values.
  explicit RadialProfile(std::vector<double> values);
  explicit RadialProfile(QuantileGrid grid);

  const QuantileGrid& grid() const { return grid_; }
  std::span<const double> values() const { return grid_.values(); }
  std::size_t size() const { return grid_.size(); }
  double operator[](std::size_t j) const { return grid_[j]; }

  friend bool operator==(const RadialProfile&, const RadialProfile&) = default;

 private:
  QuantileGrid grid_;
};

// The generator m~: an opaque tag plus the quantile grid of its norm.
struct SphericalGenerator {
  std::string id;
  QuantileGrid norm_quantiles;
};

class SphericalMeasure {
 public:
  SphericalMeasure(std::string generator_id, RadialProfile profile)
      : generator_id_(std::move(generator_id)), profile_(std::move(profile)) {}

  const std::string& generator_id() const { return generator_id_; }
  const RadialProfile& profile() const { return profile_; }

  friend bool operator==(const SphericalMeasure&, const SphericalMeasure&) = default;

 private:
  std::string generator_id_;
  RadialProfile profile_;
};

namespace spherical {

// law(alpha(|x|)/|x| x) for x ~ generator; alpha is evaluated at the norm quantiles.
SphericalMeasure from_radial_map(const SphericalGenerator& generator, const std::function<double(double)>& alpha);

// The generator itself (alpha = identity).
SphericalMeasure generator_measure(const SphericalGenerator& generator);

// Radial part r -> alpha2(alpha1^{-1}(r)) of the optimal map, as the
// piecewise-linear interpolant through the knots (alpha1_j, alpha2_j).
class RadialMap {
 public:
  RadialMap(std::vector<double> source, std::vector<double> target);

  double operator()(double r) const;

  // (*this) after `first`, sampled on first's knots.
  RadialMap after(const RadialMap& first) const;

  std::span<const double> source() const { return source_; }
  std::span<const double> target() const { return target_; }

 private:
  std::vector<double> source_;
  std::vector<double> target_;
};

RadialMap optimal_radial_map(const RadialProfile& from, const RadialProfile& to);

// The optimal map m1 -> m2 sampled at m1's norm quantiles: in profile
// coordinates this is alpha2 itself.
RadialProfile transport_profile(const RadialProfile& alpha1, const RadialProfile& alpha2);

// sqrt((1/M) sum_j (alpha_j^a - alpha_j^b)^2).
double w2(const SphericalMeasure& a, const SphericalMeasure& b);

// alpha <- (1 - gamma) alpha_0 + gamma sum_i w_i alpha_i.
SphericalMeasure weighted_step(const SphericalMeasure& mu, std::span<const SphericalMeasure> atoms,
                               std::span<const double> weights, double gamma);
SphericalMeasure sgd_step(const SphericalMeasure& mu, std::span<const SphericalMeasure> batch, double gamma);

// Profile average sum_i lambda_i alpha_i.
SphericalMeasure exact_barycenter(const FiniteSupport<SphericalMeasure>& pi);

}  // namespace spherical

struct SphericalFamily {
  using Measure = SphericalMeasure;
  using Tangent = std::vector<double>;
  static constexpr std::string_view kName = "spherical";

  double w2(const Measure& a, const Measure& b) const { return spherical::w2(a, b); }
  Tangent log_map(const Measure& mu, const Measure& m) const;
  Tangent zero_tangent(const Measure& mu) const { return Tangent(mu.profile().size(), 0.0); }
  void axpy(Tangent& acc, double a, const Tangent& v) const { QuantileFamily{}.axpy(acc, a, v); }
  double norm_sq(const Measure& mu, const Tangent& v) const { return QuantileFamily{}.norm_sq(mu.profile().grid(), v); }
  Measure weighted_step(const Measure& mu, std::span<const Measure> atoms, std::span<const double> weights,
                        double gamma) const {
    return spherical::weighted_step(mu, atoms, weights, gamma);
  }
  Measure sgd_step(const Measure& mu, std::span<const Measure> batch, double gamma) const {
    return spherical::sgd_step(mu, batch, gamma);
  }
  Measure exact_barycenter(const FiniteSupport<Measure>& pi) const { return spherical::exact_barycenter(pi); }
};

}  // namespace wbary
