#pragma once

#include <ostream>
#include <vector>

#include "experiment.hpp"
#include "wbary/copula.hpp"

namespace wbary::cli {

// 0 success, 1 validation, 2 runtime or numeric, 3 I/O.
int exit_code_for(ErrorCode code);

// Writes the population under out_dir and returns the manifest path.
fs::path cmd_generate(const json& params, std::uint64_t seed, const fs::path& out_dir, std::ostream& out);

struct IngestOptions {
  std::vector<fs::path> files;
  FamilyKind family = FamilyKind::Univariate;
  std::size_t grid_size = quantile1d::kDefaultGridSize;
  CopulaSpec copula;  // copula family only
  fs::path out_dir = "out";
};

// One measure file per CSV plus a uniform-weight manifest.
fs::path cmd_ingest(const IngestOptions& opts, std::ostream& out);

struct RunSummary {
  std::size_t steps = 0;
  double F = 0.0;
  double grad_norm = 0.0;  // sqrt of grad_norm_sq
  double w2_oracle = 0.0;  // NaN without a reference
  std::string stop_reason;
  fs::path record;
  fs::path series;
};

RunSummary cmd_run(const ExperimentSpec& spec, std::ostream& out);

struct CompareRow {
  std::string method;
  std::size_t steps = 0;
  double F_gap = 0.0;
  double w2_oracle = 0.0;
  double wall_time_s = 0.0;
  bool reached = false;
};

struct VarianceRow {
  std::size_t batch_size = 1;
  double V = 0.0;
  double V_se = 0.0;
  double V_times_S = 0.0;
  double V_times_S_se = 0.0;
};

struct CompareResult {
  std::vector<CompareRow> methods;
  std::vector<VarianceRow> variance;
  double scale = 0.0;
  double tolerance = 0.0;
  double exact_V1 = 0.0;  // 2F - ||F'||^2 at the starting measure (variance mode)
  fs::path table;
};

// spec.compare: {"mode": "methods" | "variance", "tol": 1e-3, "batch": 16,
// "fixed_point_max_iter": 500, "batch_sizes": [1,2,4,8,16], "n_mc": 100000}.
CompareResult cmd_compare(const ExperimentSpec& spec, std::ostream& out);

// Checks an experiment spec, manifest or measure file; prints what it found.
void cmd_validate(const fs::path& path, std::ostream& out);

}  // namespace wbary::cli
