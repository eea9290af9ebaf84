#include "generate.hpp"

#include <cmath>

#include "wbary/io.hpp"

namespace wbary::cli {
namespace {

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorCode::InvalidSpec, msg); }

template <class T>
T param(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    bad(std::string("generator field '") + key + "' has the wrong type");
  }
}

std::vector<double> uniform_weights(std::size_t n) {
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double head = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) head += w[i];
  w.back() = 1.0 - head;
  return w;
}

std::size_t positive(const json& j, const char* key, std::size_t fallback) {
  const auto v = param<std::size_t>(j, key, fallback);
  if (v == 0) bad(std::string("'") + key + "' must be positive");
  return v;
}

GeneratedPopulation gaussian1d(const json& j) {
  const auto m = positive(j, "grid_size", quantile1d::kDefaultGridSize);
  const auto means = param<std::vector<double>>(j, "means", {1.0, 3.0});
  const auto stds = param<std::vector<double>>(j, "stds", {1.0, 1.0});
  const auto weights = param<std::vector<double>>(j, "weights", {0.3, 0.7});
  if (means.size() != stds.size() || means.size() != weights.size() || means.empty())
    bad("gaussian1d needs equally long nonempty 'means', 'stds', 'weights'");
  GeneratedPopulation out{FamilyKind::Univariate, weights, {}};
  for (std::size_t i = 0; i < means.size(); ++i) out.measures.push_back(io::to_json(quantile1d::from_gaussian(means[i], stds[i], m)));
  return out;
}

GeneratedPopulation logconcave(const json& j, Rng& rng) {
  const auto m = positive(j, "grid_size", quantile1d::kDefaultGridSize);
  const auto n = positive(j, "count", 10);
  GeneratedPopulation out{FamilyKind::Univariate, uniform_weights(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double loc = uniform(rng, -2.0, 2.0);
    const double scale = uniform(rng, 0.5, 2.0);
    QuantileGrid g = [&] {
      switch (i % 6) {
        case 0: return quantile1d::from_gaussian(loc, scale, m);
        case 1: return quantile1d::from_logistic(loc, scale, m);
        case 2: return quantile1d::from_gumbel(loc, scale, m);
        case 3: return quantile1d::from_laplace(loc, scale, m);
        case 4: return quantile1d::from_exponential(1.0 / scale, m);
        default: return quantile1d::from_gamma(uniform(rng, 1.0, 5.0), scale, m);
      }
    }();
    out.measures.push_back(io::to_json(g));
  }
  return out;
}

GeneratedPopulation spd(const json& j, Rng& rng) {
  const auto q = static_cast<Eigen::Index>(positive(j, "dim", 3));
  const auto n = positive(j, "count", 20);
  const double cond = param<double>(j, "max_condition", 100.0);
  const double scale = param<double>(j, "scale", 1.0);
  const double spread = param<double>(j, "mean_spread", 1.0);
  if (!(cond >= 1.0)) bad("max_condition must be >= 1");
  GeneratedPopulation out{FamilyKind::ScatterLocation, uniform_weights(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    Vector b(q);
    for (Eigen::Index k = 0; k < q; ++k) b[k] = spread * standard_normal(rng);
    out.measures.push_back(io::to_json(ScatterLocationMeasure(b, scatter::random_spd(q, cond, rng, scale))));
  }
  return out;
}

GeneratedPopulation profiles(const json& j, Rng& rng) {
  const auto m = positive(j, "grid_size", quantile1d::kDefaultGridSize);
  const auto q = positive(j, "dim", 3);
  const auto n = positive(j, "count", 10);
  // |x| for x ~ N(0, I_q): chi with q degrees of freedom, sqrt of Gamma(q/2, 2).
  const auto chi2 = quantile1d::from_gamma(0.5 * static_cast<double>(q), 2.0, m);
  std::vector<double> r(chi2.values().begin(), chi2.values().end());
  for (auto& x : r) x = std::sqrt(x);
  const SphericalGenerator g{"std-normal-" + std::to_string(q), QuantileGrid(r)};
  GeneratedPopulation out{FamilyKind::Spherical, uniform_weights(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    const double a = uniform(rng, 0.5, 2.0);
    const double p = uniform(rng, 0.5, 1.5);
    out.measures.push_back(io::to_json(spherical::from_radial_map(g, [a, p](double x) { return a * std::pow(x, p); })));
  }
  return out;
}

GeneratedPopulation copulas(const json& j, Rng& rng) {
  const auto m = positive(j, "grid_size", quantile1d::kDefaultGridSize);
  const auto q = positive(j, "dim", 2);
  const auto n = positive(j, "count", 5);
  const auto kind = param<std::string>(j, "copula", "independence");
  CopulaSpec c;
  if (kind == "gaussian") {
    const double rho = param<double>(j, "rho", 0.0);
    Eigen::MatrixXd r = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(q), static_cast<Eigen::Index>(q), rho);
    r.diagonal().setOnes();
    c = CopulaSpec::gaussian(r);
  } else if (kind != "independence") {
    bad("copula must be 'independence' or 'gaussian'");
  }
  GeneratedPopulation out{FamilyKind::Copula, uniform_weights(n), {}};
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<QuantileGrid> marg;
    for (std::size_t k = 0; k < q; ++k) marg.push_back(quantile1d::from_gaussian(uniform(rng, -2, 2), uniform(rng, 0.5, 2), m));
    out.measures.push_back(io::to_json(CopulaMeasure(c, std::move(marg))));
  }
  return out;
}

}  // namespace

GeneratedPopulation generate_population(const json& params, std::uint64_t seed) {
  if (!params.is_object()) bad("generator parameters must be a JSON object");
  const auto kind = param<std::string>(params, "kind", "gaussian1d");
  Rng rng = make_rng(seed);
  if (kind == "gaussian1d") return gaussian1d(params);
  if (kind == "logconcave") return logconcave(params, rng);
  if (kind == "spd") return spd(params, rng);
  if (kind == "profiles") return profiles(params, rng);
  if (kind == "copula") return copulas(params, rng);
  bad("unknown generator kind '" + kind + "'");
}

}  // namespace wbary::cli
