#pragma once

#include <cstdint>
#include <vector>

#include "experiment.hpp"

namespace wbary::cli {

struct GeneratedPopulation {
  FamilyKind family;
  std::vector<double> weights;
  std::vector<json> measures;
};

// Synthetic populations, keyed by "kind":
//   gaussian1d  explicit "means", "stds", "weights" lists
//   logconcave  "count" random members of the named log-concave families
//   spd         "dim", "max_condition", "count" random scatter-location measures
//   profiles    "dim", "count" spherical measures over the standard normal in R^dim
//   copula      "dim", "count", "copula" ("independence" | "gaussian"), "rho"
// All kinds take "grid_size" where it applies.
GeneratedPopulation generate_population(const json& params, std::uint64_t seed);

}  // namespace wbary::cli
