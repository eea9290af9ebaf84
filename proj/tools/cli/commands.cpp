#include "commands.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "csv_ingest.hpp"
#include "generate.hpp"
#include "population_io.hpp"
#include "wbary/io.hpp"

namespace wbary::cli {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

template <class Fn>
auto with_family(FamilyKind kind, Fn&& fn) {
  switch (kind) {
    case FamilyKind::Univariate: return fn(QuantileFamily{});
    case FamilyKind::Copula: return fn(CopulaFamily{});
    case FamilyKind::Spherical: return fn(SphericalFamily{});
    case FamilyKind::ScatterLocation: break;
  }
  return fn(ScatterLocationFamily{});
}

double rms(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s / static_cast<double>(v.size()));
}

// W2 distance to the point mass at the origin.
double scale_of(const QuantileGrid& g) { return rms(g.values()); }
double scale_of(const SphericalMeasure& m) { return rms(m.profile().values()); }
double scale_of(const ScatterLocationMeasure& m) { return std::sqrt(m.cov().trace() + m.mean().squaredNorm()); }
double scale_of(const CopulaMeasure& m) {
  double s = 0.0;
  for (const auto& g : m.marginals()) s += std::pow(rms(g.values()), 2);
  return std::sqrt(s);
}

template <class M>
M default_init(const PopulationModel<M>& pi, const ExperimentSpec& spec) {
  if constexpr (std::is_same_v<M, QuantileGrid>) {
    const std::size_t m = pi.is_finite() ? pi.finite().atom(0).size() : spec.grid_size;
    return quantile1d::from_gaussian(0.0, 1.0, m);
  } else if constexpr (std::is_same_v<M, ScatterLocationMeasure>) {
    const auto q = pi.finite().atom(0).dim();
    return ScatterLocationMeasure(Vector::Zero(q), Matrix::Identity(q, q));
  } else if constexpr (std::is_same_v<M, CopulaMeasure>) {
    const auto& a = pi.finite().atom(0);
    return CopulaMeasure(a.copula(), std::vector<QuantileGrid>(a.dim(), quantile1d::from_gaussian(0.0, 1.0, a.grid_size())));
  } else {
    return pi.finite().atom(0);
  }
}

template <class Fam>
std::optional<typename Fam::Measure> oracle_for(const Fam& fam, const PopulationModel<typename Fam::Measure>& pi,
                                                const ExperimentSpec& spec) {
  if (spec.reference == "none") return std::nullopt;
  if (pi.is_finite()) return fam.exact_barycenter(pi.finite());
  if constexpr (std::is_same_v<typename Fam::Measure, QuantileGrid>)
    return Gaussian1dModel::from_json(spec.population.generative).barycenter(spec.grid_size);
  return std::nullopt;
}

template <class Fam>
typename Fam::Measure initial_measure(const PopulationModel<typename Fam::Measure>& pi, const ExperimentSpec& spec) {
  if (spec.init) return measure_from_spec<typename Fam::Measure>(*spec.init, spec.grid_size);
  return default_init(pi, spec);
}

std::string fmt(double x) {
  if (std::isnan(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(6) << x;
  return os.str();
}

template <class Fam>
RunSummary run_family(const Fam& fam, const ExperimentSpec& spec, std::ostream& out) {
  using M = typename Fam::Measure;
  spec.solver.validate();
  const auto pi = load_population<M>(spec);
  const M mu0 = initial_measure<Fam>(pi, spec);
  const auto ref = oracle_for(fam, pi, spec);
  const auto rec = run(fam, pi, mu0, spec.solver, ref);

  RunSummary s;
  s.steps = rec.steps();
  s.stop_reason = rec.stop_reason;
  s.record = spec.out_dir / spec.record_file;
  s.series = spec.out_dir / spec.series_file;
  io::write_json_file(s.record, io::record_to_json(rec));
  std::ostringstream csv;
  io::write_series_csv(csv, rec.series);
  io::write_text_file(s.series, csv.str());

  const auto& last = rec.series.back();
  s.F = last.F;
  s.grad_norm = std::sqrt(last.grad_norm_sq);
  s.w2_oracle = ref ? fam.w2(rec.final_measure(), *ref) : kNaN;
  out << "family       " << rec.family << "\n"
      << "steps        " << s.steps << " (" << s.stop_reason << ")\n"
      << "wall time    " << fmt(rec.wall_time_s) << " s\n"
      << "final F      " << fmt(s.F) << "\n"
      << "grad norm    " << fmt(s.grad_norm) << "\n"
      << "w2 to oracle " << fmt(s.w2_oracle) << "\n"
      << "record       " << s.record.string() << "\n"
      << "series       " << s.series.string() << "\n";
  return s;
}

template <class T>
T compare_param(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("compare field '") + key + "' has the wrong type");
  }
}

template <class Fam>
CompareResult compare_family(const Fam& fam, const ExperimentSpec& spec, std::ostream& out) {
  using M = typename Fam::Measure;
  spec.solver.validate();
  const auto pi = load_population<M>(spec);
  if (!pi.is_finite()) throw Error(ErrorCode::RequiresFiniteSupport, "compare needs a finite population");
  const auto& fin = pi.finite();
  const M mu0 = initial_measure<Fam>(pi, spec);
  const auto mode = compare_param<std::string>(spec.compare, "mode", "methods");

  CompareResult res;
  std::ostringstream csv;
  csv << std::setprecision(17);
  if (mode == "methods") {
    const M oracle = fam.exact_barycenter(fin);
    const double f_hat = functional_F(fam, oracle, fin);
    res.scale = scale_of(oracle);
    if (!(res.scale > 0.0)) res.scale = 1.0;
    res.tolerance = compare_param<double>(spec.compare, "tol", 1e-3) * res.scale;

    {
      const auto fp_max = compare_param<std::size_t>(spec.compare, "fixed_point_max_iter", 500);
      const auto t0 = std::chrono::steady_clock::now();
      M mu = mu0;
      std::size_t k = 0;
      double d = fam.w2(mu, oracle);
      while (d > res.tolerance && k < fp_max) {
        mu = gradient_step(fam, mu, fin, 1.0);
        ++k;
        d = fam.w2(mu, oracle);
      }
      res.methods.push_back({"fixed-point", k, functional_F(fam, mu, fin) - f_hat, d,
                             std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(),
                             d <= res.tolerance});
    }
    const auto batch = compare_param<std::size_t>(spec.compare, "batch", 16);
    for (const auto& [name, s] : {std::pair<std::string, std::size_t>{"sgd", 1}, {"bsgd", batch}}) {
      SolverConfig cfg = spec.solver;
      cfg.batch_sizes = {s};
      cfg.stop = {StoppingRule::Kind::W2ToReferenceBelow, res.tolerance};
      const auto rec = run(fam, pi, mu0, cfg, std::optional<M>(oracle));
      const double d = rec.series.back().w2_ref;
      res.methods.push_back({name + (s > 1 ? "(S=" + std::to_string(s) + ")" : ""), rec.steps(),
                             rec.series.back().F - f_hat, d, rec.wall_time_s, d <= res.tolerance});
    }

    csv << "method,steps,F_gap,w2_oracle,wall_time_s,reached\n";
    for (const auto& r : res.methods)
      csv << r.method << ',' << r.steps << ',' << r.F_gap << ',' << r.w2_oracle << ',' << r.wall_time_s << ','
          << (r.reached ? 1 : 0) << '\n';
    out << "target: w2 <= " << fmt(res.tolerance) << " (scale " << fmt(res.scale) << ")\n";
    out << std::left << std::setw(14) << "method" << std::setw(10) << "steps" << std::setw(14) << "F gap"
        << std::setw(14) << "w2 oracle" << std::setw(12) << "time (s)" << "reached\n";
    for (const auto& r : res.methods)
      out << std::left << std::setw(14) << r.method << std::setw(10) << r.steps << std::setw(14) << fmt(r.F_gap)
          << std::setw(14) << fmt(r.w2_oracle) << std::setw(12) << fmt(r.wall_time_s) << (r.reached ? "yes" : "no")
          << "\n";
  } else if (mode == "variance") {
    const auto sizes = compare_param<std::vector<std::size_t>>(spec.compare, "batch_sizes", {1, 2, 4, 8, 16});
    const auto n_mc = compare_param<std::size_t>(spec.compare, "n_mc", 100000);
    res.exact_V1 = 2.0 * functional_F(fam, mu0, fin) - grad_norm_sq(fam, mu0, fin);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto est = integrated_variance(fam, pi, mu0, sizes[i], n_mc, spec.solver.seed + i);
      const double s = static_cast<double>(sizes[i]);
      res.variance.push_back({sizes[i], est.value, est.std_error, est.value * s, est.std_error * s});
    }
    csv << "S,V_S,V_S_se,V_S_times_S,V_S_times_S_se\n";
    for (const auto& r : res.variance)
      csv << r.batch_size << ',' << r.V << ',' << r.V_se << ',' << r.V_times_S << ',' << r.V_times_S_se << '\n';
    out << "2F - |F'|^2 at start: " << fmt(res.exact_V1) << "\n";
    out << std::left << std::setw(6) << "S" << std::setw(14) << "V_S" << std::setw(14) << "se" << std::setw(14)
        << "V_S * S" << "se\n";
    for (const auto& r : res.variance)
      out << std::left << std::setw(6) << r.batch_size << std::setw(14) << fmt(r.V) << std::setw(14) << fmt(r.V_se)
          << std::setw(14) << fmt(r.V_times_S) << fmt(r.V_times_S_se) << "\n";
  } else {
    bad("compare mode must be 'methods' or 'variance'");
  }
  res.table = spec.out_dir / ("compare_" + mode + ".csv");
  io::write_text_file(res.table, csv.str());
  out << "table        " << res.table.string() << "\n";
  return res;
}

}  // namespace

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::IoError:
      return 3;
    case ErrorCode::MaxIterExceeded:
      return 2;
    default:
      return 1;
  }
}

fs::path cmd_generate(const json& params, std::uint64_t seed, const fs::path& out_dir, std::ostream& out) {
  const auto pop = generate_population(params, seed);
  const auto manifest = write_population(out_dir, pop.family, pop.weights, pop.measures);
  out << "wrote " << pop.measures.size() << " " << family_name(pop.family) << " measures\n"
      << "manifest     " << manifest.string() << "\n";
  return manifest;
}

fs::path cmd_ingest(const IngestOptions& opts, std::ostream& out) {
  if (opts.files.empty()) bad("ingest needs at least one CSV file");
  if (opts.family != FamilyKind::Univariate && opts.family != FamilyKind::Copula)
    bad("ingest supports the univariate and copula families");
  std::vector<json> measures;
  std::vector<std::string> names;
  for (const auto& f : opts.files) {
    const auto table = read_samples_csv(f);
    std::vector<QuantileGrid> marginals;
    for (const auto& col : table.columns) marginals.push_back(quantile1d::from_samples(col, opts.grid_size));
    if (opts.family == FamilyKind::Univariate) {
      if (table.cols() != 1)
        throw Error(ErrorCode::DimensionMismatch, f.string() + ": univariate ingest needs exactly one column");
      measures.push_back(io::to_json(marginals.front()));
    } else {
      measures.push_back(io::to_json(CopulaMeasure(opts.copula, std::move(marginals))));
    }
    names.push_back(f.stem().string() + ".json");
    out << f.string() << ": " << table.rows() << " rows, " << table.cols() << " column(s)\n";
  }
  std::vector<double> w(measures.size(), 1.0 / static_cast<double>(measures.size()));
  const auto manifest = write_population(opts.out_dir, opts.family, w, measures, names);
  out << "manifest     " << manifest.string() << "\n";
  return manifest;
}

RunSummary cmd_run(const ExperimentSpec& spec, std::ostream& out) {
  return with_family(spec.family, [&](const auto& fam) { return run_family(fam, spec, out); });
}

CompareResult cmd_compare(const ExperimentSpec& spec, std::ostream& out) {
  return with_family(spec.family, [&](const auto& fam) { return compare_family(fam, spec, out); });
}

void cmd_validate(const fs::path& path, std::ostream& out) {
  const json j = io::read_json_file(path);
  if (j.is_object() && j.contains("atoms")) {
    const auto man = read_manifest(path);
    ExperimentSpec spec;
    spec.family = man.family;
    spec.population.manifest = path;
    const auto n = with_family(man.family, [&](const auto& fam) {
      return load_population<typename std::decay_t<decltype(fam)>::Measure>(spec).finite().size();
    });
    out << path.string() << ": manifest, " << n << " " << family_name(man.family) << " measures, ok\n";
  } else if (j.is_object() && j.contains("measure") && j.contains("family")) {
    const auto family = parse_family(j.at("family").get<std::string>());
    with_family(family, [&](const auto& fam) {
      measure_from_spec<typename std::decay_t<decltype(fam)>::Measure>(j.at("measure"), quantile1d::kDefaultGridSize);
      return 0;
    });
    out << path.string() << ": " << family_name(family) << " measure, ok\n";
  } else {
    const auto spec = parse_experiment(j, path.parent_path());
    const auto n = with_family(spec.family, [&](const auto& fam) {
      const auto pi = load_population<typename std::decay_t<decltype(fam)>::Measure>(spec);
      return pi.is_finite() ? pi.finite().size() : std::size_t{0};
    });
    out << path.string() << ": experiment (" << family_name(spec.family) << ", "
        << (n ? std::to_string(n) + " atoms" : std::string("generative")) << "), ok\n";
  }
}

}  // namespace wbary::cli
