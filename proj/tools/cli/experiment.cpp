#include "experiment.hpp"

#include <set>

#include "wbary/io.hpp"

namespace wbary::cli {
namespace {

const std::set<std::string> kKnownKeys{
    "family",      "manifest",        "population", "generative",      "grid_size", "init",
    "schedule",    "schedule_mode",   "batch_size", "batch_sizes",     "max_steps", "seed",
    "snapshot_stride", "stop",        "stop_tol",   "mc_eval_samples", "reference", "out_dir",
    "record",      "series",          "compare",    "generate"};

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("field '") + key + "' has the wrong type");
  }
}

fs::path resolve(const fs::path& base, const fs::path& p) { return p.is_absolute() || base.empty() ? p : base / p; }

}  // namespace

FamilyKind parse_family(const std::string& name) {
  if (name == "univariate") return FamilyKind::Univariate;
  if (name == "copula") return FamilyKind::Copula;
  if (name == "spherical") return FamilyKind::Spherical;
  if (name == "scatter-location") return FamilyKind::ScatterLocation;
  bad("unknown family '" + name + "'");
}

std::string family_name(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::Univariate: return "univariate";
    case FamilyKind::Copula: return "copula";
    case FamilyKind::Spherical: return "spherical";
    case FamilyKind::ScatterLocation: return "scatter-location";
  }
  return "?";
}

StepSchedule parse_schedule(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "harmonic") return StepSchedule::harmonic();
    bad("unknown schedule '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) bad("schedule must be a string or an object");
  const auto kind = get_or<std::string>(j, "kind", "power");
  if (kind == "constant") {
    if (!j.contains("gamma")) bad("constant schedule needs 'gamma'");
    return ConstantStep{get_or<double>(j, "gamma", 0.0)};
  }
  if (kind == "power")
    return PowerDecay{get_or<double>(j, "scale", 1.0), get_or<double>(j, "offset", 1.0), get_or<double>(j, "exponent", 1.0)};
  bad("unknown schedule kind '" + kind + "'");
}

json schedule_to_json(const StepSchedule& s) {
  if (const auto* c = std::get_if<ConstantStep>(&s.kind())) return {{"kind", "constant"}, {"gamma", c->gamma}};
  const auto& p = std::get<PowerDecay>(s.kind());
  return {{"kind", "power"}, {"scale", p.scale}, {"offset", p.offset}, {"exponent", p.exponent}};
}

ExperimentSpec parse_experiment(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) bad("experiment spec must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.contains(key)) bad("unknown field '" + key + "'");

  ExperimentSpec spec;
  spec.family = parse_family(get_or<std::string>(j, "family", "univariate"));

  const int sources = j.contains("manifest") + j.contains("population") + j.contains("generative");
  if (sources > 1) bad("give exactly one of 'manifest', 'population', 'generative'");
  if (j.contains("population")) {
    spec.population.kind = PopulationSource::Kind::Inline;
    spec.population.atoms = j.at("population");
    if (!spec.population.atoms.is_array() || spec.population.atoms.empty()) bad("'population' must be a nonempty list");
  } else if (j.contains("generative")) {
    spec.population.kind = PopulationSource::Kind::Generative;
    spec.population.generative = j.at("generative");
    if (spec.population.generative.is_string()) spec.population.generative = {{"name", spec.population.generative}};
  } else if (j.contains("manifest")) {
    spec.population.manifest = resolve(base_dir, get_or<std::string>(j, "manifest", ""));
  }

  if (!j.contains("family") && spec.population.kind == PopulationSource::Kind::Manifest &&
      !spec.population.manifest.empty()) {
    const auto& m = spec.population.manifest;
    const json man = io::read_json_file(fs::is_directory(m) ? m / "manifest.json" : m);
    if (man.is_object() && man.contains("family") && man.at("family").is_string())
      spec.family = parse_family(man.at("family").get<std::string>());
  }

  spec.grid_size = get_or<std::size_t>(j, "grid_size", spec.grid_size);
  if (spec.grid_size == 0) bad("grid_size must be positive");
  if (j.contains("init")) spec.init = j.at("init");

  auto& cfg = spec.solver;
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"));
  const auto mode = get_or<std::string>(j, "schedule_mode", "any");
  if (mode == "any") {
    cfg.schedule_mode = ScheduleMode::Any;
  } else if (mode == "convergent") {
    cfg.schedule_mode = ScheduleMode::Convergent;
  } else {
    bad("schedule_mode must be 'any' or 'convergent'");
  }
  if (j.contains("batch_sizes")) {
    cfg.batch_sizes = get_or<std::vector<std::size_t>>(j, "batch_sizes", {});
  } else if (j.contains("batch_size")) {
    cfg.batch_sizes = {get_or<std::size_t>(j, "batch_size", 1)};
  }
  cfg.max_steps = get_or<std::size_t>(j, "max_steps", cfg.max_steps);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.snapshot_stride = get_or<std::size_t>(j, "snapshot_stride", cfg.snapshot_stride);
  cfg.mc_eval_samples = get_or<std::size_t>(j, "mc_eval_samples", cfg.mc_eval_samples);
  const auto stop = get_or<std::string>(j, "stop", "max_steps");
  if (stop == "max_steps") {
    cfg.stop.kind = StoppingRule::Kind::MaxSteps;
  } else if (stop == "grad_norm") {
    cfg.stop.kind = StoppingRule::Kind::GradNormBelow;
  } else if (stop == "w2_reference") {
    cfg.stop.kind = StoppingRule::Kind::W2ToReferenceBelow;
  } else {
    bad("stop must be one of max_steps, grad_norm, w2_reference");
  }
  cfg.stop.tol = get_or<double>(j, "stop_tol", 0.0);
  cfg.validate();

  spec.reference = get_or<std::string>(j, "reference", spec.reference);
  if (spec.reference != "oracle" && spec.reference != "none") bad("reference must be 'oracle' or 'none'");
  spec.out_dir = resolve(base_dir, get_or<std::string>(j, "out_dir", spec.out_dir.string()));
  spec.record_file = get_or<std::string>(j, "record", spec.record_file);
  spec.series_file = get_or<std::string>(j, "series", spec.series_file);
  if (j.contains("compare")) spec.compare = j.at("compare");
  return spec;
}

}  // namespace wbary::cli
