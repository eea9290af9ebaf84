#include "wbary/spherical.hpp"

#include <algorithm>
#include <cmath>

#include "wbary/errors.hpp"

namespace wbary {
namespace {

QuantileGrid nonnegative(QuantileGrid g) {
  if (g[0] < 0.0) throw Error(ErrorCode::InvalidGrid, "radial profile must be nonnegative");
  return g;
}

void require_same_generator(const SphericalMeasure& a, const SphericalMeasure& b) {
  if (a.generator_id() != b.generator_id())
    throw Error(ErrorCode::GeneratorMismatch, "generators '" + a.generator_id() + "' and '" + b.generator_id() + "'");
  if (a.profile().size() != b.profile().size()) throw Error(ErrorCode::GridMismatch, "profile sizes differ");
}

std::vector<QuantileGrid> grids_of(std::span<const SphericalMeasure> ms) {
  std::vector<QuantileGrid> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.push_back(m.profile().grid());
  return out;
}

}  // namespace

RadialProfile::RadialProfile(std::vector<double> values) : grid_(nonnegative(QuantileGrid(std::move(values)))) {}
RadialProfile::RadialProfile(QuantileGrid grid) : grid_(nonnegative(std::move(grid))) {}

namespace spherical {

SphericalMeasure from_radial_map(const SphericalGenerator& generator, const std::function<double(double)>& alpha) {
  const auto r = generator.norm_quantiles.values();
  if (r[0] < 0.0) throw Error(ErrorCode::InvalidGrid, "generator norm quantiles must be nonnegative");
  std::vector<double> values(r.size());
  std::transform(r.begin(), r.end(), values.begin(), alpha);
  return SphericalMeasure(generator.id, RadialProfile(std::move(values)));
}

SphericalMeasure generator_measure(const SphericalGenerator& generator) {
  return from_radial_map(generator, [](double r) { return r; });
}

RadialMap::RadialMap(std::vector<double> source, std::vector<double> target)
    : source_(std::move(source)), target_(std::move(target)) {
  if (source_.empty() || source_.size() != target_.size())
    throw Error(ErrorCode::GridMismatch, "radial map needs matching non-empty knot lists");
  for (std::size_t j = 1; j < source_.size(); ++j)
    if (source_[j] < source_[j - 1] || target_[j] < target_[j - 1])
      throw Error(ErrorCode::InvalidGrid, "radial map knots must be nondecreasing");
}

double RadialMap::operator()(double r) const {
  if (r <= source_.front()) return target_.front();
  if (r >= source_.back()) return target_.back();
  auto it = std::upper_bound(source_.begin(), source_.end(), r);
  const auto hi = static_cast<std::size_t>(it - source_.begin());
  const std::size_t lo = hi - 1;
  const double t = (r - source_[lo]) / (source_[hi] - source_[lo]);
  return target_[lo] + t * (target_[hi] - target_[lo]);
}

RadialMap RadialMap::after(const RadialMap& first) const {
  std::vector<double> target(first.source_.size());
  for (std::size_t j = 0; j < target.size(); ++j) target[j] = (*this)(first.target_[j]);
  return RadialMap(first.source_, std::move(target));
}

RadialMap optimal_radial_map(const RadialProfile& from, const RadialProfile& to) {
  if (from.size() != to.size()) throw Error(ErrorCode::GridMismatch, "profile sizes differ");
  return RadialMap({from.values().begin(), from.values().end()}, {to.values().begin(), to.values().end()});
}

RadialProfile transport_profile(const RadialProfile& alpha1, const RadialProfile& alpha2) {
  const RadialMap t = optimal_radial_map(alpha1, alpha2);
  return RadialProfile(std::vector<double>(t.target().begin(), t.target().end()));
}

double w2(const SphericalMeasure& a, const SphericalMeasure& b) {
  require_same_generator(a, b);
  return quantile1d::w2(a.profile().grid(), b.profile().grid());
}

SphericalMeasure weighted_step(const SphericalMeasure& mu, std::span<const SphericalMeasure> atoms,
                               std::span<const double> weights, double gamma) {
  if (atoms.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  for (const auto& a : atoms) require_same_generator(mu, a);
  const auto grids = grids_of(atoms);
  return SphericalMeasure(mu.generator_id(),
                          RadialProfile(quantile1d::weighted_step(mu.profile().grid(), grids, weights, gamma)));
}

SphericalMeasure sgd_step(const SphericalMeasure& mu, std::span<const SphericalMeasure> batch, double gamma) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  const std::vector<double> weights(batch.size(), 1.0 / static_cast<double>(batch.size()));
  return weighted_step(mu, batch, weights, gamma);
}

SphericalMeasure exact_barycenter(const FiniteSupport<SphericalMeasure>& pi) {
  for (const auto& m : pi.atoms()) require_same_generator(pi.atom(0), m);
  FiniteSupport<QuantileGrid> grids(std::vector<double>(pi.weights().begin(), pi.weights().end()),
                                    grids_of(pi.atoms()));
  return SphericalMeasure(pi.atom(0).generator_id(), RadialProfile(quantile1d::exact_barycenter(grids)));
}

}  // namespace spherical

SphericalFamily::Tangent SphericalFamily::log_map(const Measure& mu, const Measure& m) const {
  require_same_generator(mu, m);
  return QuantileFamily{}.log_map(mu.profile().grid(), m.profile().grid());
}

}  // namespace wbary
