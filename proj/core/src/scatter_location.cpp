#include "wbary/scatter_location.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wbary {
namespace {

using Eigen::SelfAdjointEigenSolver;

void require_same_dim(Eigen::Index a, Eigen::Index b) {
  if (a != b)
    throw Error(ErrorCode::DimensionMismatch, "dimensions " + std::to_string(a) + " and " + std::to_string(b));
}

// V f(clamped lambda) V^T for a symmetric matrix.
template <class Fn>
Matrix spectral_apply(const Matrix& s, Fn fn) {
  SelfAdjointEigenSolver<Matrix> es(s);
  if (es.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "eigendecomposition failed");
  Vector lambda = es.eigenvalues();
  const double top = lambda.maxCoeff();
  if (!(top > 0.0)) throw Error(ErrorCode::NotSpd, "matrix has no positive eigenvalue");
  const double floor = kSpdFloor * top;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) lambda[i] = fn(std::max(lambda[i], floor));
  const Matrix& v = es.eigenvectors();
  return scatter::symmetrize(v * lambda.asDiagonal() * v.transpose());
}

}  // namespace

SpdMatrix::SpdMatrix(Matrix m, double floor) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) throw Error(ErrorCode::NotSpd, "matrix must be square and non-empty");
  if (!m_.allFinite()) throw Error(ErrorCode::NotSpd, "matrix has non-finite entries");
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * m_.norm()) throw Error(ErrorCode::NotSpd, "matrix is not symmetric");
  SelfAdjointEigenSolver<Matrix> es(m_, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success || es.eigenvalues().minCoeff() < floor)
    throw Error(ErrorCode::NotSpd, "smallest eigenvalue below floor");
}

ScatterLocationMeasure::ScatterLocationMeasure(Vector mean, SpdMatrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  require_same_dim(mean_.size(), cov_.dim());
  if (!mean_.allFinite()) throw Error(ErrorCode::InvalidConfig, "mean has non-finite entries");
}

namespace scatter {

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix sym_sqrt(const Matrix& s) {
  return spectral_apply(s, [](double x) { return std::sqrt(x); });
}

Matrix sym_inv_sqrt(const Matrix& s) {
  return spectral_apply(s, [](double x) { return 1.0 / std::sqrt(x); });
}

SpdMatrix spd_sqrt(const SpdMatrix& s) { return SpdMatrix(sym_sqrt(s.matrix()), 0.0); }

namespace {

// Square root and inverse square root of one covariance, shared across atoms.
struct Roots {
  Matrix root;
  Matrix inv_root;

  explicit Roots(const Matrix& cov) {
    SelfAdjointEigenSolver<Matrix> es(cov);
    if (es.info() != Eigen::Success) throw Error(ErrorCode::NotSpd, "eigendecomposition failed");
    Vector lambda = es.eigenvalues();
    const double floor = kSpdFloor * lambda.maxCoeff();
    Vector r(lambda.size()), ir(lambda.size());
    for (Eigen::Index i = 0; i < lambda.size(); ++i) {
      r[i] = std::sqrt(std::max(lambda[i], floor));
      ir[i] = 1.0 / r[i];
    }
    const Matrix& v = es.eigenvectors();
    root = symmetrize(v * r.asDiagonal() * v.transpose());
    inv_root = symmetrize(v * ir.asDiagonal() * v.transpose());
  }

  // (A0 S A0)^{1/2}
  Matrix middle_root(const Matrix& s) const { return sym_sqrt(symmetrize(root * s * root)); }

  // A0^{-1} (A0 S A0)^{1/2} A0^{-1}
  Matrix map_to(const Matrix& s) const { return symmetrize(inv_root * middle_root(s) * inv_root); }
};

double transport_cost(const Matrix& a, const Matrix& cov, const Vector& shift) {
  const Matrix d = a - Matrix::Identity(a.rows(), a.cols());
  return std::max(0.0, (d * cov * d.transpose()).trace()) + shift.squaredNorm();
}

}  // namespace

AffineMap optimal_map(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2) {
  require_same_dim(m1.dim(), m2.dim());
  const Roots roots(m1.cov());
  return AffineMap{roots.map_to(m2.cov()), m1.mean(), m2.mean()};
}

double w2_sq(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2) {
  const AffineMap t = optimal_map(m1, m2);
  return transport_cost(t.linear, m1.cov(), m2.mean() - m1.mean());
}

double w2(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2) { return std::sqrt(w2_sq(m1, m2)); }

double w2_sq_bures(const ScatterLocationMeasure& m1, const ScatterLocationMeasure& m2) {
  require_same_dim(m1.dim(), m2.dim());
  const Matrix a1 = sym_sqrt(m1.cov());
  const Matrix cross = sym_sqrt(symmetrize(a1 * m2.cov() * a1));
  const double bures = m1.cov().trace() + m2.cov().trace() - 2.0 * cross.trace();
  return std::max(0.0, bures) + (m1.mean() - m2.mean()).squaredNorm();
}

ScatterLocationMeasure weighted_step(const ScatterLocationMeasure& mu, std::span<const ScatterLocationMeasure> atoms,
                                     std::span<const double> weights, double gamma) {
  if (atoms.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  if (weights.size() != atoms.size()) throw Error(ErrorCode::InvalidWeights, "one weight per atom expected");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw Error(ErrorCode::InvalidConfig, "step must lie in [0, 1]");
  for (const auto& a : atoms) require_same_dim(mu.dim(), a.dim());

  const Roots roots(mu.cov());
  const Eigen::Index q = mu.dim();
  Matrix inner = Matrix::Zero(q, q);
  Vector target_mean = Vector::Zero(q);
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    inner += weights[i] * roots.middle_root(atoms[i].cov());
    target_mean += weights[i] * atoms[i].mean();
  }
  const Matrix b = symmetrize((1.0 - gamma) * mu.cov() + gamma * inner);
  Matrix cov = symmetrize(roots.inv_root * b * b * roots.inv_root);
  Vector mean = (1.0 - gamma) * mu.mean() + gamma * target_mean;
  return ScatterLocationMeasure(std::move(mean), SpdMatrix(std::move(cov), 0.0));
}

ScatterLocationMeasure sgd_step(const ScatterLocationMeasure& mu, std::span<const ScatterLocationMeasure> batch,
                                double gamma) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  const std::vector<double> weights(batch.size(), 1.0 / static_cast<double>(batch.size()));
  return weighted_step(mu, batch, weights, gamma);
}

double karcher_residual(const ScatterLocationMeasure& mu, const FiniteSupport<ScatterLocationMeasure>& pi) {
  const Roots roots(mu.cov());
  const Eigen::Index q = mu.dim();
  Matrix avg = Matrix::Zero(q, q);
  Vector mean = Vector::Zero(q);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    require_same_dim(q, pi.atom(i).dim());
    avg += pi.weight(i) * roots.map_to(pi.atom(i).cov());
    mean += pi.weight(i) * pi.atom(i).mean();
  }
  return transport_cost(avg, mu.cov(), mu.mean() - mean);
}

double functional_F(const ScatterLocationMeasure& mu, const FiniteSupport<ScatterLocationMeasure>& pi) {
  const Roots roots(mu.cov());
  double acc = 0.0;
  for (std::size_t i = 0; i < pi.size(); ++i) {
    const auto& m = pi.atom(i);
    require_same_dim(mu.dim(), m.dim());
    acc += pi.weight(i) * transport_cost(roots.map_to(m.cov()), mu.cov(), m.mean() - mu.mean());
  }
  return 0.5 * acc;
}

FixedPointResult fixed_point_iterate(const FiniteSupport<ScatterLocationMeasure>& pi, const FixedPointOptions& opts) {
  const Eigen::Index q = pi.atom(0).dim();
  Matrix mean_cov = Matrix::Zero(q, q);
  Vector mean = Vector::Zero(q);
  for (std::size_t i = 0; i < pi.size(); ++i) {
    require_same_dim(q, pi.atom(i).dim());
    mean_cov += pi.weight(i) * pi.atom(i).cov();
    mean += pi.weight(i) * pi.atom(i).mean();
  }
  const double tol = opts.tol.value_or(1e-10 * mean_cov.trace());

  ScatterLocationMeasure current(mean, SpdMatrix(symmetrize(mean_cov), 0.0));
  double residual = karcher_residual(current, pi);
  FixedPointResult best{current, residual, 0, residual < tol};
  for (std::size_t it = 1; it <= opts.max_iter && !best.converged; ++it) {
    current = weighted_step(current, pi.atoms(), pi.weights(), 1.0);
    current = ScatterLocationMeasure(mean, SpdMatrix(current.cov(), 0.0));
    residual = karcher_residual(current, pi);
    if (residual < best.residual) best = FixedPointResult{current, residual, it, false};
    best.iterations = it;
    best.converged = best.residual < tol;
  }
  return best;
}

MaxIterExceeded::MaxIterExceeded(FixedPointResult best)
    : Error(ErrorCode::MaxIterExceeded,
            "fixed-point iteration stopped with residual " + std::to_string(best.residual)),
      best_(std::move(best)) {}

ScatterLocationMeasure fixed_point_barycenter(const FiniteSupport<ScatterLocationMeasure>& pi,
                                              const FixedPointOptions& opts) {
  FixedPointResult r = fixed_point_iterate(pi, opts);
  if (!r.converged) throw MaxIterExceeded(std::move(r));
  return r.measure;
}

Matrix random_spd(Eigen::Index dim, double max_condition, Rng& rng, double scale) {
  if (dim < 1 || !(max_condition >= 1.0) || !(scale > 0.0))
    throw Error(ErrorCode::InvalidConfig, "random_spd needs dim >= 1, condition >= 1, scale > 0");
  Matrix g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = standard_normal(rng);
  const Matrix qmat = Eigen::HouseholderQR<Matrix>(g).householderQ() * Matrix::Identity(dim, dim);
  Vector lambda(dim);
  const double log_cond = std::log(max_condition);
  for (Eigen::Index i = 0; i < dim; ++i) {
    double t = uniform01(rng);
    if (dim >= 2 && i == 0) t = 0.0;
    if (dim >= 2 && i == 1) t = 1.0;
    lambda[i] = scale * std::exp(t * log_cond);
  }
  return symmetrize(qmat * lambda.asDiagonal() * qmat.transpose());
}

}  // namespace scatter

AffineTangent ScatterLocationFamily::log_map(const Measure& mu, const Measure& m) const {
  const AffineMap t = scatter::optimal_map(mu, m);
  return AffineTangent{t.linear - Matrix::Identity(mu.dim(), mu.dim()), m.mean() - mu.mean()};
}

AffineTangent ScatterLocationFamily::zero_tangent(const Measure& mu) const {
  return AffineTangent{Matrix::Zero(mu.dim(), mu.dim()), Vector::Zero(mu.dim())};
}

void ScatterLocationFamily::axpy(Tangent& acc, double a, const Tangent& v) const {
  require_same_dim(acc.shift.size(), v.shift.size());
  acc.linear += a * v.linear;
  acc.shift += a * v.shift;
}

double ScatterLocationFamily::norm_sq(const Measure& mu, const Tangent& v) const {
  require_same_dim(mu.dim(), v.shift.size());
  return std::max(0.0, (v.linear * mu.cov() * v.linear.transpose()).trace()) + v.shift.squaredNorm();
}

}  // namespace wbary
