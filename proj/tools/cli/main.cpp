#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "wbary/io.hpp"

using namespace wbary;
using namespace wbary::cli;

namespace {

struct Overrides {
  std::string family, manifest, schedule, schedule_mode, stop, generative;
  std::vector<std::size_t> batch_sizes;
  std::size_t steps = 0, grid_size = 0, snapshot_stride = 0;
  double stop_tol = 0.0;
  std::string mode;
  double tol = 0.0;
  std::size_t batch = 0, n_mc = 0;
};

// "harmonic", "constant:G" or "power:SCALE,OFFSET,EXPONENT".
json schedule_flag(const std::string& s) {
  if (s == "harmonic") return s;
  const auto colon = s.find(':');
  const std::string kind = s.substr(0, colon);
  std::vector<double> v;
  if (colon != std::string::npos) {
    std::stringstream ss(s.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
  }
  if (kind == "constant" && v.size() == 1) return {{"kind", "constant"}, {"gamma", v[0]}};
  if (kind == "power" && v.size() == 3) return {{"kind", "power"}, {"scale", v[0]}, {"offset", v[1]}, {"exponent", v[2]}};
  throw Error(ErrorCode::InvalidSpec, "bad --schedule '" + s + "'");
}

void add_run_flags(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--family", o.family, "univariate | copula | spherical | scatter-location");
  cmd->add_option("--manifest", o.manifest, "population manifest file or directory");
  cmd->add_option("--generative", o.generative, "named generative population (gaussian1d)");
  cmd->add_option("--steps", o.steps, "maximum number of steps");
  cmd->add_option("--batch-size", o.batch_sizes, "batch size; several values give S_0, S_1, ... (last repeats)");
  cmd->add_option("--schedule", o.schedule, "harmonic | constant:G | power:SCALE,OFFSET,EXPONENT");
  cmd->add_option("--schedule-mode", o.schedule_mode, "any | convergent");
  cmd->add_option("--stop", o.stop, "max_steps | grad_norm | w2_reference");
  cmd->add_option("--stop-tol", o.stop_tol, "tolerance for the stopping rule");
  cmd->add_option("--grid-size", o.grid_size, "quantile grid size for parametric measures");
  cmd->add_option("--snapshot-stride", o.snapshot_stride, "snapshot every N steps (0: first and last)");
}

json load_config(const std::string& path) { return path.empty() ? json::object() : io::read_json_file(path); }

fs::path base_dir(const std::string& config) { return config.empty() ? fs::path{} : fs::path(config).parent_path(); }

std::string absolute(const std::string& p) { return fs::absolute(p).string(); }

void apply(json& j, CLI::App* cmd, const Overrides& o) {
  if (cmd->count("--family")) j["family"] = o.family;
  if (cmd->count("--manifest")) {
    j.erase("population");
    j.erase("generative");
    j["manifest"] = absolute(o.manifest);
  }
  if (cmd->count("--generative")) {
    j.erase("population");
    j.erase("manifest");
    j["generative"] = o.generative;
  }
  if (cmd->count("--steps")) j["max_steps"] = o.steps;
  if (cmd->count("--batch-size")) {
    j.erase("batch_size");
    j["batch_sizes"] = o.batch_sizes;
  }
  if (cmd->count("--schedule")) j["schedule"] = schedule_flag(o.schedule);
  if (cmd->count("--schedule-mode")) j["schedule_mode"] = o.schedule_mode;
  if (cmd->count("--stop")) j["stop"] = o.stop;
  if (cmd->count("--stop-tol")) j["stop_tol"] = o.stop_tol;
  if (cmd->count("--grid-size")) j["grid_size"] = o.grid_size;
  if (cmd->count("--snapshot-stride")) j["snapshot_stride"] = o.snapshot_stride;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wasserstein barycenters by stochastic gradient descent"};
  app.require_subcommand(1);
  app.fallthrough();

  std::uint64_t seed = 0;
  std::string out_dir, config;
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out-dir", out_dir, "output directory");
  app.add_option("--config", config, "JSON experiment spec; flags override its fields");

  Overrides o;

  auto* gen = app.add_subcommand("generate", "write a synthetic population and its manifest");
  std::string kind, copula = "independence";
  std::size_t count = 0, dim = 0;
  double max_cond = 0.0, rho = 0.0;
  std::vector<double> means, stds, weights;
  gen->add_option("--kind", kind, "gaussian1d | logconcave | spd | profiles | copula");
  gen->add_option("--count", count, "number of measures");
  gen->add_option("--dim", dim, "dimension");
  gen->add_option("--grid-size", o.grid_size, "quantile grid size");
  gen->add_option("--max-condition", max_cond, "largest condition number (spd)");
  gen->add_option("--copula", copula, "independence | gaussian");
  gen->add_option("--rho", rho, "Gaussian copula correlation");
  gen->add_option("--means", means, "gaussian1d means");
  gen->add_option("--stds", stds, "gaussian1d standard deviations");
  gen->add_option("--weights", weights, "gaussian1d weights");

  auto* ingest = app.add_subcommand("ingest", "turn CSV samples into measure files");
  std::vector<std::string> csv_files;
  std::string ingest_family = "univariate";
  std::size_t ingest_grid = quantile1d::kDefaultGridSize;
  ingest->add_option("files", csv_files, "CSV files, one measure each")->required();
  ingest->add_option("--family", ingest_family, "univariate | copula");
  ingest->add_option("--grid-size", ingest_grid, "quantile grid size");
  ingest->add_option("--copula", copula, "declared copula: independence | gaussian");
  ingest->add_option("--rho", rho, "Gaussian copula correlation");

  auto* run = app.add_subcommand("run", "run SGD and write the record and scalar series");
  add_run_flags(run, o);

  auto* cmp = app.add_subcommand("compare", "compare methods or batch-size variance on a finite population");
  add_run_flags(cmp, o);
  cmp->add_option("--mode", o.mode, "methods | variance");
  cmp->add_option("--tol", o.tol, "target w2 as a fraction of the barycenter scale");
  cmp->add_option("--batch", o.batch, "batch size of the BSGD method");
  cmp->add_option("--n-mc", o.n_mc, "Monte Carlo samples per batch size (variance mode)");

  auto* val = app.add_subcommand("validate", "check a spec, manifest or measure file");
  std::string target;
  val->add_option("file", target, "file to check")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    json cfg = load_config(config);
    const bool have_seed = app.count("--seed") > 0;
    if (have_seed) cfg["seed"] = seed;
    if (!out_dir.empty()) cfg["out_dir"] = absolute(out_dir);

    if (gen->parsed()) {
      json params = cfg.contains("generate") ? cfg.at("generate") : json::object();
      if (gen->count("--kind")) params["kind"] = kind;
      if (gen->count("--count")) params["count"] = count;
      if (gen->count("--dim")) params["dim"] = dim;
      if (gen->count("--grid-size")) params["grid_size"] = o.grid_size;
      if (gen->count("--max-condition")) params["max_condition"] = max_cond;
      if (gen->count("--copula")) params["copula"] = copula;
      if (gen->count("--rho")) params["rho"] = rho;
      if (gen->count("--means")) params["means"] = means;
      if (gen->count("--stds")) params["stds"] = stds;
      if (gen->count("--weights")) params["weights"] = weights;
      const auto dir = cfg.contains("out_dir") ? fs::path(cfg.at("out_dir").get<std::string>()) : fs::path("out");
      cmd_generate(params, cfg.value("seed", std::uint64_t{0}), dir, std::cout);
    } else if (ingest->parsed()) {
      IngestOptions opts;
      for (const auto& f : csv_files) opts.files.emplace_back(f);
      opts.family = parse_family(ingest_family);
      opts.grid_size = ingest_grid;
      if (copula == "gaussian") {
        Eigen::MatrixXd r(2, 2);
        r << 1.0, rho, rho, 1.0;
        opts.copula = CopulaSpec::gaussian(r);
      } else if (copula != "independence") {
        throw Error(ErrorCode::InvalidSpec, "--copula must be independence or gaussian");
      }
      if (cfg.contains("out_dir")) opts.out_dir = cfg.at("out_dir").get<std::string>();
      cmd_ingest(opts, std::cout);
    } else if (run->parsed()) {
      apply(cfg, run, o);
      cmd_run(parse_experiment(cfg, base_dir(config)), std::cout);
    } else if (cmp->parsed()) {
      apply(cfg, cmp, o);
      if (!cfg.contains("compare")) cfg["compare"] = json::object();
      if (cmp->count("--mode")) cfg["compare"]["mode"] = o.mode;
      if (cmp->count("--tol")) cfg["compare"]["tol"] = o.tol;
      if (cmp->count("--batch")) cfg["compare"]["batch"] = o.batch;
      if (cmp->count("--n-mc")) cfg["compare"]["n_mc"] = o.n_mc;
      cmd_compare(parse_experiment(cfg, base_dir(config)), std::cout);
    } else if (val->parsed()) {
      cmd_validate(target, std::cout);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const json::exception& e) {
    std::cerr << "error [parse]: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
