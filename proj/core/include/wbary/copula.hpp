#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "wbary/population.hpp"
#include "wbary/quantile1d.hpp"
#include "wbary/rng.hpp"

namespace wbary {

enum class CopulaKind { Independence, Gaussian };

// Identifies the shared copula. Equality is by value (kind + correlation);
// nothing is tested statistically.
struct CopulaSpec {
  CopulaKind kind = CopulaKind::Independence;
  Eigen::MatrixXd correlation;  // empty for Independence

  static CopulaSpec independence() { return {}; }
  static CopulaSpec gaussian(Eigen::MatrixXd correlation);

  std::string tag() const;

  friend bool operator==(const CopulaSpec& a, const CopulaSpec& b) {
    return a.kind == b.kind && a.correlation.rows() == b.correlation.rows() &&
           a.correlation.cols() == b.correlation.cols() && a.correlation == b.correlation;
  }
};

// Law on R^q with copula `copula` and the given marginal quantile grids.
class CopulaMeasure {
 public:
  CopulaMeasure(CopulaSpec copula, std::vector<QuantileGrid> marginals);

  const CopulaSpec& copula() const { return copula_; }
  const std::vector<QuantileGrid>& marginals() const { return marginals_; }
  const QuantileGrid& marginal(std::size_t i) const { return marginals_[i]; }
  std::size_t dim() const { return marginals_.size(); }
  std::size_t grid_size() const { return marginals_.front().size(); }

 private:
  CopulaSpec copula_;
  std::vector<QuantileGrid> marginals_;
};

namespace copula {

// Marginal-wise quantile1d::weighted_step; the copula carries over.
CopulaMeasure weighted_step(const CopulaMeasure& mu, std::span<const CopulaMeasure> atoms,
                            std::span<const double> weights, double gamma);
CopulaMeasure sgd_step(const CopulaMeasure& mu, std::span<const CopulaMeasure> batch, double gamma);

// sqrt(sum_i W2^2(a_i, b_i)); exact when both share the copula.
double w2(const CopulaMeasure& a, const CopulaMeasure& b);

CopulaMeasure exact_barycenter(const FiniteSupport<CopulaMeasure>& pi);

// Pi pushed to coordinate i.
FiniteSupport<QuantileGrid> marginal_population(const FiniteSupport<CopulaMeasure>& pi, std::size_t i);

// n points (rows) drawn as u ~ copula, x_i = Q_i(u_i).
Eigen::MatrixXd sample_points(const CopulaMeasure& m, std::size_t n, Rng& rng);

}  // namespace copula

struct CopulaFamily {
  using Measure = CopulaMeasure;
  using Tangent = std::vector<std::vector<double>>;
  static constexpr std::string_view kName = "copula";

  double w2(const Measure& a, const Measure& b) const { return copula::w2(a, b); }
  Tangent log_map(const Measure& mu, const Measure& m) const;
  Tangent zero_tangent(const Measure& mu) const;
  void axpy(Tangent& acc, double a, const Tangent& v) const;
  double norm_sq(const Measure& mu, const Tangent& v) const;
  Measure weighted_step(const Measure& mu, std::span<const Measure> atoms, std::span<const double> weights,
                        double gamma) const {
    return copula::weighted_step(mu, atoms, weights, gamma);
  }
  Measure sgd_step(const Measure& mu, std::span<const Measure> batch, double gamma) const {
    return copula::sgd_step(mu, batch, gamma);
  }
  Measure exact_barycenter(const FiniteSupport<Measure>& pi) const { return copula::exact_barycenter(pi); }
};

}  // namespace wbary
