#pragma once

#include <filesystem>
#include <vector>

#include "experiment.hpp"
#include "wbary/io.hpp"

namespace wbary::cli {

// Univariate measures may be given parametrically:
// {"dist": "gaussian", "params": [mean, std]}; other dists: exponential [rate],
// logistic/gumbel/laplace [location, scale], gamma [shape, scale], point [x].
QuantileGrid grid_from_spec(const json& j, std::size_t grid_size);

template <class M>
M measure_from_spec(const json& j, std::size_t grid_size);
template <>
QuantileGrid measure_from_spec<QuantileGrid>(const json& j, std::size_t grid_size);
template <>
ScatterLocationMeasure measure_from_spec<ScatterLocationMeasure>(const json& j, std::size_t grid_size);
template <>
CopulaMeasure measure_from_spec<CopulaMeasure>(const json& j, std::size_t grid_size);
template <>
SphericalMeasure measure_from_spec<SphericalMeasure>(const json& j, std::size_t grid_size);

// Measure files: {"family": name, "measure": {...}}.
json envelope(FamilyKind family, json measure);
json read_measure_file(const fs::path& path, FamilyKind family);

struct Manifest {
  FamilyKind family;
  std::vector<double> weights;
  std::vector<fs::path> files;
};

Manifest read_manifest(const fs::path& path_or_dir);

// Writes <dir>/atom_NNN.json and <dir>/manifest.json; returns the manifest path.
fs::path write_population(const fs::path& dir, FamilyKind family, const std::vector<double>& weights,
                          const std::vector<json>& measures, const std::vector<std::string>& names = {});

// The only named generative model: univariate Gaussians with
// mean ~ U[mean_lo, mean_hi], std ~ U[std_lo, std_hi].
struct Gaussian1dModel {
  double mean_lo = -1.0, mean_hi = 1.0;
  double std_lo = 0.5, std_hi = 2.0;

  static Gaussian1dModel from_json(const json& j);
  Generative<QuantileGrid> model(std::size_t grid_size) const;
  // Quantile average of the population: N(E mean, E std).
  QuantileGrid barycenter(std::size_t grid_size) const;
};

template <class M>
PopulationModel<M> load_population(const ExperimentSpec& spec);

}  // namespace wbary::cli
