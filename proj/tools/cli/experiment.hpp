#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "wbary/quantile1d.hpp"
#include "wbary/solver.hpp"

namespace wbary::cli {

using json = nlohmann::json;
namespace fs = std::filesystem;

enum class FamilyKind { Univariate, Copula, Spherical, ScatterLocation };

FamilyKind parse_family(const std::string& name);
std::string family_name(FamilyKind kind);

struct PopulationSource {
  enum class Kind { Inline, Manifest, Generative };
  Kind kind = Kind::Manifest;
  json atoms;           // Inline: [{"weight": w, ...measure or parametric...}]
  fs::path manifest;    // Manifest: file, or a directory holding manifest.json
  json generative;      // Generative: {"name": ..., params}
};

// Flat JSON experiment description. Relative paths resolve against the
// directory of the config file.
struct ExperimentSpec {
  FamilyKind family = FamilyKind::Univariate;
  PopulationSource population;
  std::size_t grid_size = quantile1d::kDefaultGridSize;
  std::optional<json> init;
  SolverConfig solver;
  std::string reference = "oracle";  // "oracle" | "none"
  fs::path out_dir = "out";
  std::string record_file = "record.json";
  std::string series_file = "series.csv";
  json compare = json::object();
};

// Throws Error(InvalidSpec | InvalidConfig | RejectedSchedule).
ExperimentSpec parse_experiment(const json& j, const fs::path& base_dir = {});

StepSchedule parse_schedule(const json& j);
json schedule_to_json(const StepSchedule& s);

}  // namespace wbary::cli
