#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "wbary/errors.hpp"
#include "wbary/population.hpp"
#include "wbary/rng.hpp"

namespace wbary {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline constexpr double kSpdFloor = 1e-10;

// Symmetric positive-definite matrix. Construction checks symmetry
// (max |S_ij - S_ji| <= 1e-12 ||S||) and smallest eigenvalue >= floor.
class SpdMatrix {
 public:
  explicit SpdMatrix(Matrix m, double floor = kSpdFloor);

  const Matrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  double trace() const { return m_.trace(); }

 private:
  Matrix m_;
};

// law(A x + b) for a zero-mean identity-covariance generator x; stored as
// (b, Sigma = A^2). The generator itself never needs to be materialised.
class ScatterLocationMeasure {
 public:
  ScatterLocationMeasure(Vector mean, SpdMatrix cov);
  ScatterLocationMeasure(Vector mean, Matrix cov) : ScatterLocationMeasure(std::move(mean), SpdMatrix(std::move(cov))) {}

  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_.matrix(); }
  Eigen::Index dim() const { return mean_.size(); }

 private:
  Vector mean_;
  SpdMatrix cov_;
};

// x -> linear (x - source_mean) + target_mean.
struct AffineMap {
  Matrix linear;
  Vector source_mean;
  Vector target_mean;

  Vector operator()(const Vector& x) const { return linear * (x - source_mean) + target_mean; }
};

// T - I for an affine T, in the coordinates y = x - b_mu: y -> linear y + shift.
struct AffineTangent {
  Matrix linear;
  Vector shift;
};

namespace scatter {

// Unique SPD square root via symmetric eigendecomposition. Eigenvalues are
// clamped at 1e-10 * lambda_max. Throws NotSpd if the input is not SPD.
SpdMatrix spd_sqrt(const SpdMatrix& s);

// Same calculus on raw symmetric matrices; results are symmetrised.
Matrix sym_sqrt(const Matrix& s);
Matrix sym_inv_sqrt(const Matrix& s);
Matrix symmetrize(const Matrix& m);

// A = A1^{-1} (A1 Sigma2 A1)^{1/2} A1^{-1}, A_i = Sigma_i^{1/2}.
AffineMap optimal_map(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2);

// ||b1 - b2||^2 + tr((A - I) Sigma1 (A - I)) with A from optimal_map.
double w2_sq(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2);
double w2(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2);

// Bures form tr(S1 + S2 - 2 (S1^{1/2} S2 S1^{1/2})^{1/2}) + ||b1 - b2||^2.
double w2_sq_bures(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2);

// b <- (1 - g) b0 + g sum w_i b_i,
// Sigma <- A0^{-1} [(1 - g) Sigma0 + g sum w_i (A0 Sigma_i A0)^{1/2}]^2 A0^{-1}.
ScatterLocationMeasure weighted_step(const ScatterLocationMeasure& mu, std::span<const ScatterLocationMeasure> atoms,
                                     std::span<const double> weights, double gamma);
ScatterLocationMeasure sgd_step(const ScatterLocationMeasure& mu, std::span<const ScatterLocationMeasure> batch,
                                double gamma);

// tr((M - I) Sigma (M - I)) + ||b - sum lambda_i b_i||^2, M = sum lambda_i A_mu^{m_i}.
double karcher_residual(const ScatterLocationMeasure& mu, const FiniteSupport<ScatterLocationMeasure>& pi);

double functional_F(const ScatterLocationMeasure& mu, const FiniteSupport<ScatterLocationMeasure>& pi);

struct FixedPointOptions {
  std::optional<double> tol;  // default 1e-10 * trace of the weighted mean covariance
  std::size_t max_iter = 500;
};

struct FixedPointResult {
  ScatterLocationMeasure measure;
  double residual;
  std::size_t iterations;
  bool converged;
};

// Iterates the fixed-point map G (a unit step against the full weighted
// support) from the weighted mean covariance until karcher_residual < tol.
// Never throws on non-convergence; returns the best iterate seen.
FixedPointResult fixed_point_iterate(const FiniteSupport<ScatterLocationMeasure>& pi,
                                     const FixedPointOptions& opts = {});

class MaxIterExceeded : public Error {
 public:
  explicit MaxIterExceeded(FixedPointResult best);
  const FixedPointResult& best() const { return best_; }

 private:
  FixedPointResult best_;
};

// Throws MaxIterExceeded carrying the best iterate and its residual.
ScatterLocationMeasure fixed_point_barycenter(const FiniteSupport<ScatterLocationMeasure>& pi,
                                              const FixedPointOptions& opts = {});

// Q diag(lambda) Q^T with Q Haar-ish orthogonal and lambda log-uniform in
// [scale, scale * max_condition] (both ends attained when dim >= 2).
Matrix random_spd(Eigen::Index dim, double max_condition, Rng& rng, double scale = 1.0);

}  // namespace scatter

struct ScatterLocationFamily {
  using Measure = ScatterLocationMeasure;
  using Tangent = AffineTangent;
  static constexpr std::string_view kName = "scatter-location";

  double w2(const Measure& a, const Measure& b) const { return scatter::w2(a, b); }
  Tangent log_map(const Measure& mu, const Measure& m) const;
  Tangent zero_tangent(const Measure& mu) const;
  void axpy(Tangent& acc, double a, const Tangent& v) const;
  double norm_sq(const Measure& mu, const Tangent& v) const;
  Measure weighted_step(const Measure& mu, std::span<const Measure> atoms, std::span<const double> weights,
                        double gamma) const {
    return scatter::weighted_step(mu, atoms, weights, gamma);
  }
  Measure sgd_step(const Measure& mu, std::span<const Measure> batch, double gamma) const {
    return scatter::sgd_step(mu, batch, gamma);
  }
  Measure exact_barycenter(const FiniteSupport<Measure>& pi) const { return scatter::fixed_point_barycenter(pi); }
  double functional_F(const Measure& mu, const FiniteSupport<Measure>& pi) const {
    return scatter::functional_F(mu, pi);
  }
};

}  // namespace wbary
