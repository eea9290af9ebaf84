#include "wbary/copula.hpp"

#include <cmath>
#include <sstream>

#include "wbary/errors.hpp"
#include "wbary/normal.hpp"

namespace wbary {
namespace {

void require_compatible(const CopulaMeasure& a, const CopulaMeasure& b) {
  if (!(a.copula() == b.copula()))
    throw Error(ErrorCode::CopulaMismatch, "copulas " + a.copula().tag() + " and " + b.copula().tag());
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "marginal counts differ");
}

}  // namespace

CopulaSpec CopulaSpec::gaussian(Eigen::MatrixXd correlation) {
  const auto q = correlation.rows();
  if (q == 0 || correlation.cols() != q) throw Error(ErrorCode::InvalidConfig, "correlation must be square");
  for (Eigen::Index i = 0; i < q; ++i)
    if (correlation(i, i) != 1.0) throw Error(ErrorCode::InvalidConfig, "correlation diagonal must be 1");
  if ((correlation - correlation.transpose()).cwiseAbs().maxCoeff() > 0.0)
    throw Error(ErrorCode::InvalidConfig, "correlation must be symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(correlation);
  if (llt.info() != Eigen::Success) throw Error(ErrorCode::InvalidConfig, "correlation must be positive definite");
  return CopulaSpec{CopulaKind::Gaussian, std::move(correlation)};
}

std::string CopulaSpec::tag() const {
  if (kind == CopulaKind::Independence) return "independence";
  std::ostringstream os;
  os.precision(17);
  os << "gaussian[";
  for (Eigen::Index i = 0; i < correlation.rows(); ++i)
    for (Eigen::Index j = i + 1; j < correlation.cols(); ++j) os << (i + j > 1 ? "," : "") << correlation(i, j);
  os << "]";
  return os.str();
}

CopulaMeasure::CopulaMeasure(CopulaSpec copula, std::vector<QuantileGrid> marginals)
    : copula_(std::move(copula)), marginals_(std::move(marginals)) {
  if (marginals_.empty()) throw Error(ErrorCode::DimensionMismatch, "copula measure needs at least one marginal");
  for (const auto& g : marginals_)
    if (g.size() != marginals_.front().size()) throw Error(ErrorCode::GridMismatch, "marginal grid sizes differ");
  if (copula_.kind == CopulaKind::Gaussian && static_cast<std::size_t>(copula_.correlation.rows()) != marginals_.size())
    throw Error(ErrorCode::DimensionMismatch, "correlation size differs from marginal count");
}

namespace copula {

CopulaMeasure weighted_step(const CopulaMeasure& mu, std::span<const CopulaMeasure> atoms,
                            std::span<const double> weights, double gamma) {
  if (atoms.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  for (const auto& a : atoms) require_compatible(mu, a);
  std::vector<QuantileGrid> out;
  out.reserve(mu.dim());
  std::vector<QuantileGrid> column;
  column.reserve(atoms.size());
  for (std::size_t i = 0; i < mu.dim(); ++i) {
    column.clear();
    for (const auto& a : atoms) column.push_back(a.marginal(i));
    out.push_back(quantile1d::weighted_step(mu.marginal(i), column, weights, gamma));
  }
  return CopulaMeasure(mu.copula(), std::move(out));
}

CopulaMeasure sgd_step(const CopulaMeasure& mu, std::span<const CopulaMeasure> batch, double gamma) {
  if (batch.empty()) throw Error(ErrorCode::EmptyBatch, "batch is empty");
  const std::vector<double> weights(batch.size(), 1.0 / static_cast<double>(batch.size()));
  return weighted_step(mu, batch, weights, gamma);
}

double w2(const CopulaMeasure& a, const CopulaMeasure& b) {
  require_compatible(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) s += quantile1d::w2_sq(a.marginal(i), b.marginal(i));
  return std::sqrt(s);
}

FiniteSupport<QuantileGrid> marginal_population(const FiniteSupport<CopulaMeasure>& pi, std::size_t i) {
  std::vector<QuantileGrid> atoms;
  atoms.reserve(pi.size());
  for (const auto& m : pi.atoms()) {
    if (i >= m.dim()) throw Error(ErrorCode::DimensionMismatch, "marginal index out of range");
    atoms.push_back(m.marginal(i));
  }
  return FiniteSupport<QuantileGrid>(std::vector<double>(pi.weights().begin(), pi.weights().end()), std::move(atoms));
}

CopulaMeasure exact_barycenter(const FiniteSupport<CopulaMeasure>& pi) {
  const CopulaMeasure& first = pi.atom(0);
  for (const auto& m : pi.atoms()) require_compatible(first, m);
  std::vector<QuantileGrid> out;
  out.reserve(first.dim());
  for (std::size_t i = 0; i < first.dim(); ++i) out.push_back(quantile1d::exact_barycenter(marginal_population(pi, i)));
  return CopulaMeasure(first.copula(), std::move(out));
}

Eigen::MatrixXd sample_points(const CopulaMeasure& m, std::size_t n, Rng& rng) {
  const auto q = static_cast<Eigen::Index>(m.dim());
  Eigen::MatrixXd points(static_cast<Eigen::Index>(n), q);
  Eigen::MatrixXd chol;
  if (m.copula().kind == CopulaKind::Gaussian) {
    Eigen::LLT<Eigen::MatrixXd> llt(m.copula().correlation);
    if (llt.info() != Eigen::Success) throw Error(ErrorCode::CopulaMismatch, "correlation is not positive definite");
    chol = llt.matrixL();
  }
  Eigen::VectorXd z(q);
  for (Eigen::Index r = 0; r < static_cast<Eigen::Index>(n); ++r) {
    if (m.copula().kind == CopulaKind::Independence) {
      for (Eigen::Index i = 0; i < q; ++i) points(r, i) = m.marginal(static_cast<std::size_t>(i)).quantile(uniform01(rng));
    } else {
      for (Eigen::Index i = 0; i < q; ++i) z[i] = standard_normal(rng);
      const Eigen::VectorXd x = chol * z;
      for (Eigen::Index i = 0; i < q; ++i)
        points(r, i) = m.marginal(static_cast<std::size_t>(i)).quantile(normal_cdf(x[i]));
    }
  }
  return points;
}

}  // namespace copula

CopulaFamily::Tangent CopulaFamily::log_map(const Measure& mu, const Measure& m) const {
  require_compatible(mu, m);
  const QuantileFamily unit;
  Tangent t;
  t.reserve(mu.dim());
  for (std::size_t i = 0; i < mu.dim(); ++i) t.push_back(unit.log_map(mu.marginal(i), m.marginal(i)));
  return t;
}

CopulaFamily::Tangent CopulaFamily::zero_tangent(const Measure& mu) const {
  return Tangent(mu.dim(), std::vector<double>(mu.grid_size(), 0.0));
}

void CopulaFamily::axpy(Tangent& acc, double a, const Tangent& v) const {
  if (acc.size() != v.size()) throw Error(ErrorCode::DimensionMismatch, "tangent dimensions differ");
  const QuantileFamily unit;
  for (std::size_t i = 0; i < acc.size(); ++i) unit.axpy(acc[i], a, v[i]);
}

double CopulaFamily::norm_sq(const Measure& mu, const Tangent& v) const {
  if (mu.dim() != v.size()) throw Error(ErrorCode::DimensionMismatch, "tangent dimension differs");
  const QuantileFamily unit;
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) s += unit.norm_sq(mu.marginal(i), v[i]);
  return s;
}

}  // namespace wbary
