#include "population_io.hpp"

#include <cmath>
#include <cstdio>

namespace wbary::cli {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

std::vector<double> params_of(const json& j, std::size_t n, const std::string& dist) {
  std::vector<double> p;
  try {
    p = j.value("params", std::vector<double>{});
  } catch (const json::exception&) {
    bad("params of '" + dist + "' must be numbers");
  }
  if (p.size() != n) bad("'" + dist + "' takes " + std::to_string(n) + " parameter(s)");
  return p;
}

double weight_of(const json& atom) {
  if (!atom.contains("weight") || !atom.at("weight").is_number()) bad("every atom needs a numeric 'weight'");
  return atom.at("weight").get<double>();
}

template <class M>
FiniteSupport<M> finite_from_manifest(const fs::path& path, FamilyKind family, std::size_t grid_size) {
  const Manifest man = read_manifest(path);
  if (man.family != family)
    bad(path.string() + ": manifest family '" + family_name(man.family) + "' does not match '" + family_name(family) + "'");
  std::vector<M> atoms;
  for (const auto& f : man.files) atoms.push_back(measure_from_spec<M>(read_measure_file(f, man.family), grid_size));
  return FiniteSupport<M>(man.weights, std::move(atoms));
}

template <class M>
FiniteSupport<M> finite_from_inline(const json& list, std::size_t grid_size) {
  std::vector<double> w;
  std::vector<M> atoms;
  for (const auto& atom : list) {
    w.push_back(weight_of(atom));
    atoms.push_back(measure_from_spec<M>(atom.contains("measure") ? atom.at("measure") : atom, grid_size));
  }
  return FiniteSupport<M>(std::move(w), std::move(atoms));
}

}  // namespace

QuantileGrid grid_from_spec(const json& j, std::size_t grid_size) {
  if (!j.is_object()) bad("a measure must be a JSON object");
  if (!j.contains("dist")) return io::grid_from_json(j);
  const auto dist = j.at("dist").get<std::string>();
  if (dist == "gaussian") {
    const auto p = params_of(j, 2, dist);
    return quantile1d::from_gaussian(p[0], p[1], grid_size);
  }
  if (dist == "exponential") return quantile1d::from_exponential(params_of(j, 1, dist)[0], grid_size);
  if (dist == "logistic") {
    const auto p = params_of(j, 2, dist);
    return quantile1d::from_logistic(p[0], p[1], grid_size);
  }
  if (dist == "gumbel") {
    const auto p = params_of(j, 2, dist);
    return quantile1d::from_gumbel(p[0], p[1], grid_size);
  }
  if (dist == "laplace") {
    const auto p = params_of(j, 2, dist);
    return quantile1d::from_laplace(p[0], p[1], grid_size);
  }
  if (dist == "gamma") {
    const auto p = params_of(j, 2, dist);
    return quantile1d::from_gamma(p[0], p[1], grid_size);
  }
  if (dist == "point") return quantile1d::point_mass(params_of(j, 1, dist)[0], grid_size);
  bad("unknown dist '" + dist + "'");
}

template <>
QuantileGrid measure_from_spec<QuantileGrid>(const json& j, std::size_t grid_size) {
  return grid_from_spec(j, grid_size);
}

template <>
ScatterLocationMeasure measure_from_spec<ScatterLocationMeasure>(const json& j, std::size_t) {
  return io::scatter_from_json(j);
}

template <>
CopulaMeasure measure_from_spec<CopulaMeasure>(const json& j, std::size_t grid_size) {
  if (!j.is_object() || !j.contains("marginals") || !j.at("marginals").is_array()) bad("copula measure needs 'marginals'");
  std::vector<QuantileGrid> marginals;
  for (const auto& m : j.at("marginals")) marginals.push_back(grid_from_spec(m, grid_size));
  const CopulaSpec c = j.contains("copula") ? io::copula_spec_from_json(j.at("copula")) : CopulaSpec::independence();
  return CopulaMeasure(c, std::move(marginals));
}

template <>
SphericalMeasure measure_from_spec<SphericalMeasure>(const json& j, std::size_t) {
  return io::spherical_from_json(j);
}

json envelope(FamilyKind family, json measure) { return {{"family", family_name(family)}, {"measure", std::move(measure)}}; }

json read_measure_file(const fs::path& path, FamilyKind family) {
  const json j = io::read_json_file(path);
  if (!j.is_object() || !j.contains("family") || !j.contains("measure"))
    bad(path.string() + ": not a measure file (needs 'family' and 'measure')");
  const auto tag = j.at("family").get<std::string>();
  if (parse_family(tag) != family)
    bad(path.string() + ": family '" + tag + "' does not match '" + family_name(family) + "'");
  return j.at("measure");
}

Manifest read_manifest(const fs::path& path_or_dir) {
  const fs::path path = fs::is_directory(path_or_dir) ? path_or_dir / "manifest.json" : path_or_dir;
  const json j = io::read_json_file(path);
  if (!j.is_object() || !j.contains("family") || !j.contains("atoms") || !j.at("atoms").is_array())
    bad(path.string() + ": manifest needs 'family' and 'atoms'");
  Manifest man{parse_family(j.at("family").get<std::string>()), {}, {}};
  for (const auto& atom : j.at("atoms")) {
    man.weights.push_back(weight_of(atom));
    if (!atom.contains("file")) bad(path.string() + ": atom without 'file'");
    const fs::path f = atom.at("file").get<std::string>();
    man.files.push_back(f.is_absolute() ? f : path.parent_path() / f);
  }
  if (man.files.empty()) bad(path.string() + ": manifest has no atoms");
  return man;
}

fs::path write_population(const fs::path& dir, FamilyKind family, const std::vector<double>& weights,
                          const std::vector<json>& measures, const std::vector<std::string>& names) {
  json atoms = json::array();
  for (std::size_t i = 0; i < measures.size(); ++i) {
    std::string name;
    if (i < names.size()) {
      name = names[i];
    } else {
      char buf[32];
      std::snprintf(buf, sizeof buf, "atom_%03zu.json", i);
      name = buf;
    }
    io::write_json_file(dir / name, envelope(family, measures[i]));
    atoms.push_back({{"weight", weights[i]}, {"file", name}});
  }
  const fs::path manifest = dir / "manifest.json";
  io::write_json_file(manifest, {{"family", family_name(family)}, {"atoms", atoms}});
  return manifest;
}

Gaussian1dModel Gaussian1dModel::from_json(const json& j) {
  Gaussian1dModel g;
  auto range = [&](const char* key, double& lo, double& hi) {
    if (!j.contains(key)) return;
    const auto r = j.at(key).get<std::vector<double>>();
    if (r.size() != 2 || !(r[0] <= r[1])) bad(std::string("'") + key + "' must be [lo, hi]");
    lo = r[0];
    hi = r[1];
  };
  range("mean", g.mean_lo, g.mean_hi);
  range("std", g.std_lo, g.std_hi);
  if (!(g.std_lo > 0.0)) bad("gaussian1d std range must be positive");
  return g;
}

Generative<QuantileGrid> Gaussian1dModel::model(std::size_t grid_size) const {
  const Gaussian1dModel g = *this;
  // One grid of standard normal quantiles, shifted and scaled per draw.
  const auto unit = quantile1d::from_gaussian(0.0, 1.0, grid_size);
  return Generative<QuantileGrid>("gaussian1d", [g, unit](Rng& rng) {
    const double mean = uniform(rng, g.mean_lo, g.mean_hi);
    const double std = uniform(rng, g.std_lo, g.std_hi);
    std::vector<double> v(unit.values().begin(), unit.values().end());
    for (auto& x : v) x = mean + std * x;
    return QuantileGrid(std::move(v));
  });
}

QuantileGrid Gaussian1dModel::barycenter(std::size_t grid_size) const {
  return quantile1d::from_gaussian(0.5 * (mean_lo + mean_hi), 0.5 * (std_lo + std_hi), grid_size);
}

template <class M>
PopulationModel<M> load_population(const ExperimentSpec& spec) {
  const auto& src = spec.population;
  switch (src.kind) {
    case PopulationSource::Kind::Inline:
      return PopulationModel<M>(finite_from_inline<M>(src.atoms, spec.grid_size));
    case PopulationSource::Kind::Manifest:
      if (src.manifest.empty()) bad("no population given (manifest, population or generative)");
      return PopulationModel<M>(finite_from_manifest<M>(src.manifest, spec.family, spec.grid_size));
    case PopulationSource::Kind::Generative:
      if constexpr (std::is_same_v<M, QuantileGrid>) {
        const auto name = src.generative.value("name", std::string{});
        if (name != "gaussian1d") bad("unknown generative model '" + name + "'");
        return PopulationModel<M>(Gaussian1dModel::from_json(src.generative).model(spec.grid_size));
      } else {
        bad("generative populations are only available for the univariate family");
      }
  }
  bad("unreachable");
}

template PopulationModel<QuantileGrid> load_population(const ExperimentSpec&);
template PopulationModel<ScatterLocationMeasure> load_population(const ExperimentSpec&);
template PopulationModel<CopulaMeasure> load_population(const ExperimentSpec&);
template PopulationModel<SphericalMeasure> load_population(const ExperimentSpec&);

}  // namespace wbary::cli
