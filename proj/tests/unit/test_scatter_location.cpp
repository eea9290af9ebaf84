#include <gtest/gtest.h>

#include <cmath>

#include "wbary/family.hpp"
#include "wbary/quantile1d.hpp"
#include "wbary/scatter_location.hpp"

namespace wbary {
namespace {

namespace sl = scatter;

Matrix diag(std::initializer_list<double> d) {
  Vector v(static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) v[i++] = x;
  return v.asDiagonal();
}

ScatterLocationMeasure centred(const Matrix& cov) { return ScatterLocationMeasure(Vector::Zero(cov.rows()), cov); }

ScatterLocationMeasure gauss1(double mean, double std) {
  Vector b(1);
  b << mean;
  Matrix s(1, 1);
  s << std * std;
  return ScatterLocationMeasure(b, s);
}

double rel_frobenius(const Matrix& a, const Matrix& b) { return (a - b).norm() / b.norm(); }

TEST(SpdMatrix, Validation) {
  Matrix asym(2, 2);
  asym << 1.0, 0.5, 0.4, 1.0;
  EXPECT_THROW(SpdMatrix{asym}, Error);
  EXPECT_THROW(SpdMatrix{diag({1.0, -1.0})}, Error);
  EXPECT_THROW(SpdMatrix{diag({1.0, 1e-12})}, Error);
  EXPECT_NO_THROW(SpdMatrix{diag({1.0, 2.0})});
  EXPECT_THROW(ScatterLocationMeasure(Vector::Zero(3), diag({1.0, 1.0})), Error);
}

TEST(SpdSqrt, KnownRoots) {
  EXPECT_LT((sl::spd_sqrt(SpdMatrix(Matrix::Identity(3, 3))).matrix() - Matrix::Identity(3, 3)).norm(), 1e-15);
  EXPECT_LT((sl::spd_sqrt(SpdMatrix(diag({4.0, 9.0}))).matrix() - diag({2.0, 3.0})).norm(), 1e-14);
}

TEST(SpdSqrt, RoundTripOnRandomMatrices) {
  Rng rng = make_rng(4);
  for (int t = 0; t < 100; ++t) {
    const Matrix s = sl::random_spd(5, 100.0, rng);
    const Matrix r = sl::spd_sqrt(SpdMatrix(s)).matrix();
    EXPECT_LT(rel_frobenius(r * r, s), 1e-10);
    EXPECT_LT((r - r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(RandomSpd, ConditionBound) {
  Rng rng = make_rng(8);
  for (int t = 0; t < 50; ++t) {
    const Matrix s = sl::random_spd(4, 100.0, rng);
    Eigen::SelfAdjointEigenSolver<Matrix> es(s);
    const double cond = es.eigenvalues().maxCoeff() / es.eigenvalues().minCoeff();
    EXPECT_LE(cond, 100.0 * (1.0 + 1e-10));
    EXPECT_GE(cond, 100.0 * (1.0 - 1e-10));
  }
}

TEST(OptimalMap, KnownMaps) {
  const auto m = centred(diag({2.0, 3.0}));
  EXPECT_LT((sl::optimal_map(m, m).linear - Matrix::Identity(2, 2)).norm(), 1e-14);

  const auto t1 = sl::optimal_map(gauss1(0.0, 2.0), gauss1(0.0, 6.0));
  EXPECT_NEAR(t1.linear(0, 0), 3.0, 1e-14);

  const auto t = sl::optimal_map(centred(diag({1.0, 4.0})), centred(diag({9.0, 1.0})));
  EXPECT_LT((t.linear - diag({3.0, 0.5})).norm(), 1e-14);

  Vector x(1);
  x << 1.0;
  Vector b1(1), b2(1);
  b1 << 1.0;
  b2 << -2.0;
  const auto shift = sl::optimal_map(ScatterLocationMeasure(b1, Matrix::Identity(1, 1)),
                                     ScatterLocationMeasure(b2, Matrix::Identity(1, 1)));
  EXPECT_NEAR(shift(x)[0], -2.0, 1e-15);
}

TEST(OptimalMap, PushforwardOnRandomPairs) {
  Rng rng = make_rng(15);
  for (Eigen::Index q = 1; q <= 8; ++q) {
    for (int t = 0; t < 10; ++t) {
      const auto m1 = centred(sl::random_spd(q, 100.0, rng));
      const auto m2 = centred(sl::random_spd(q, 100.0, rng));
      const Matrix a = sl::optimal_map(m1, m2).linear;
      EXPECT_LT(rel_frobenius(a * m1.cov() * a, m2.cov()), 1e-8);
      EXPECT_GT(Eigen::SelfAdjointEigenSolver<Matrix>(a).eigenvalues().minCoeff(), 0.0);
    }
  }
  EXPECT_THROW(sl::optimal_map(centred(diag({1.0})), centred(diag({1.0, 1.0}))), Error);
}

TEST(W2, KnownValues) {
  const auto m = centred(diag({2.0, 3.0}));
  EXPECT_NEAR(sl::w2(m, m), 0.0, 1e-7);

  // Oracle: quantile1d on the same pair at M = 10^6.
  const double grid = quantile1d::w2(quantile1d::from_gaussian(0.0, 1.0, 1000000),
                                     quantile1d::from_gaussian(2.0, 2.0, 1000000));
  EXPECT_NEAR(sl::w2(gauss1(0.0, 1.0), gauss1(2.0, 2.0)), std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(sl::w2(gauss1(0.0, 1.0), gauss1(2.0, 2.0)), grid, 1e-3);

  Rng rng = make_rng(3);
  const Matrix s = sl::random_spd(3, 10.0, rng);
  const double c = 2.5;
  EXPECT_NEAR(sl::w2(centred(s), centred(c * c * s)), (c - 1.0) * std::sqrt(s.trace()), 1e-10);
}

TEST(W2, MapFormAgreesWithBuresForm) {
  Rng rng = make_rng(16);
  for (int t = 0; t < 100; ++t) {
    const Eigen::Index q = 1 + t % 5;
    Vector b1(q), b2(q);
    for (Eigen::Index i = 0; i < q; ++i) {
      b1[i] = standard_normal(rng);
      b2[i] = standard_normal(rng);
    }
    const ScatterLocationMeasure m1(b1, sl::random_spd(q, 100.0, rng));
    const ScatterLocationMeasure m2(b2, sl::random_spd(q, 100.0, rng));
    EXPECT_NEAR(sl::w2_sq(m1, m2), sl::w2_sq_bures(m1, m2), 1e-8);
  }
}

TEST(W2, MetricAxioms) {
  Rng rng = make_rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto a = centred(sl::random_spd(3, 50.0, rng));
    const auto b = centred(sl::random_spd(3, 50.0, rng));
    const auto c = centred(sl::random_spd(3, 50.0, rng));
    EXPECT_NEAR(sl::w2(a, b), sl::w2(b, a), 1e-9);
    EXPECT_GE(sl::w2(a, b) + sl::w2(b, c) - sl::w2(a, c), -1e-9);
  }
}

TEST(SgdStep, FullStepLandsOnSample) {
  Rng rng = make_rng(18);
  Vector b0(3), bm(3);
  b0 << 1, 2, 3;
  bm << -1, 0, 4;
  const ScatterLocationMeasure mu(b0, sl::random_spd(3, 20.0, rng));
  const ScatterLocationMeasure m(bm, sl::random_spd(3, 20.0, rng));
  const auto next = sl::sgd_step(mu, std::vector<ScatterLocationMeasure>{m}, 1.0);
  EXPECT_LT((next.mean() - m.mean()).norm(), 1e-10);
  EXPECT_LT(rel_frobenius(next.cov(), m.cov()), 1e-10);
  EXPECT_THROW(sl::sgd_step(mu, std::vector<ScatterLocationMeasure>{}, 0.5), Error);
}

TEST(SgdStep, ScalarReduction) {
  const std::vector<ScatterLocationMeasure> batch{gauss1(0.0, 2.0), gauss1(0.0, 4.0)};
  const auto next = sl::sgd_step(gauss1(0.0, 1.0), batch, 0.5);
  EXPECT_NEAR(std::sqrt(next.cov()(0, 0)), 2.0, 1e-12);
}

TEST(SgdStep, DiagonalPopulationsStayDiagonal) {
  Rng rng = make_rng(19);
  std::vector<ScatterLocationMeasure> atoms;
  for (int i = 0; i < 4; ++i) atoms.push_back(centred(diag({uniform(rng, 0.5, 5), uniform(rng, 0.5, 5), uniform(rng, 0.5, 5)})));
  auto mu = centred(diag({1.0, 1.0, 1.0}));
  for (std::size_t k = 0; k < 200; ++k) {
    const std::vector<ScatterLocationMeasure> batch{atoms[k % 4]};
    mu = sl::sgd_step(mu, batch, 1.0 / static_cast<double>(k + 1));
    Matrix off = mu.cov();
    off.diagonal().setZero();
    ASSERT_LT(off.cwiseAbs().maxCoeff(), 1e-12 * mu.cov().trace());
  }
}

TEST(FixedPoint, CommutingPopulation) {
  const FiniteSupport<ScatterLocationMeasure> pi({0.5, 0.5}, {centred(diag({1.0, 4.0})), centred(diag({9.0, 1.0}))});
  const auto bar = sl::fixed_point_barycenter(pi);
  EXPECT_LT(rel_frobenius(bar.cov(), diag({4.0, 2.25})), 1e-8);
  EXPECT_LT(sl::karcher_residual(bar, pi), 1e-10);
}

TEST(FixedPoint, ScalarAndSingleAtom) {
  const FiniteSupport<ScatterLocationMeasure> pi({0.3, 0.7}, {gauss1(0.0, 1.0), gauss1(0.0, 3.0)});
  const auto bar = sl::fixed_point_barycenter(pi);
  EXPECT_NEAR(std::sqrt(bar.cov()(0, 0)), 2.4, 1e-9);
  // Oracle: quantile averaging of the matching Gaussians.
  const auto q = quantile1d::exact_barycenter(FiniteSupport<QuantileGrid>(
      {0.3, 0.7}, {quantile1d::from_gaussian(0.0, 1.0, 1000), quantile1d::from_gaussian(0.0, 3.0, 1000)}));
  EXPECT_LT(quantile1d::w2(q, quantile1d::from_gaussian(0.0, std::sqrt(bar.cov()(0, 0)), 1000)), 1e-8);

  Rng rng = make_rng(20);
  Vector b(2);
  b << 1.0, -1.0;
  const ScatterLocationMeasure m(b, sl::random_spd(2, 30.0, rng));
  const auto single = sl::fixed_point_barycenter(FiniteSupport<ScatterLocationMeasure>::single(m));
  EXPECT_LT(rel_frobenius(single.cov(), m.cov()), 1e-10);
  EXPECT_LT((single.mean() - m.mean()).norm(), 1e-14);
}

TEST(FixedPoint, MaxIterExceededCarriesBestIterate) {
  Rng rng = make_rng(21);
  const FiniteSupport<ScatterLocationMeasure> pi(
      {0.5, 0.5}, {centred(sl::random_spd(3, 50.0, rng)), centred(sl::random_spd(3, 50.0, rng))});
  try {
    sl::fixed_point_barycenter(pi, {.tol = 0.0, .max_iter = 3});
    FAIL() << "expected MaxIterExceeded";
  } catch (const sl::MaxIterExceeded& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterExceeded);
    EXPECT_EQ(e.best().iterations, 3u);
    EXPECT_FALSE(e.best().converged);
    EXPECT_NEAR(sl::karcher_residual(e.best().measure, pi), e.best().residual, 1e-15);
  }
}

TEST(KarcherResidual, KnownValues) {
  const auto m = gauss1(0.5, 1.5);
  EXPECT_NEAR(sl::karcher_residual(m, FiniteSupport<ScatterLocationMeasure>::single(m)), 0.0, 1e-20);
  const double r = sl::karcher_residual(gauss1(0.0, 1.0), FiniteSupport<ScatterLocationMeasure>::single(gauss1(0.0, 2.0)));
  EXPECT_NEAR(r, 1.0, 1e-12);
  const std::size_t grid = 100000;
  const double q = quantile1d::grad_norm_sq(
      quantile1d::from_gaussian(0.0, 1.0, grid),
      FiniteSupport<QuantileGrid>::single(quantile1d::from_gaussian(0.0, 2.0, grid)));
  EXPECT_NEAR(r, q, 1e-3);
}

TEST(Family, GenericFunctionalsAgreeWithClosedForms) {
  Rng rng = make_rng(22);
  std::vector<ScatterLocationMeasure> atoms;
  for (int i = 0; i < 4; ++i) {
    Vector b(3);
    b << standard_normal(rng), standard_normal(rng), standard_normal(rng);
    atoms.emplace_back(b, sl::random_spd(3, 30.0, rng));
  }
  const auto pi = FiniteSupport<ScatterLocationMeasure>::uniform(atoms);
  const ScatterLocationFamily fam;
  const auto mu = centred(sl::random_spd(3, 10.0, rng));
  double f = 0.0;
  for (const auto& a : atoms) f += 0.25 * sl::w2_sq_bures(mu, a);
  EXPECT_NEAR(functional_F(fam, mu, pi), 0.5 * f, 1e-9);
  EXPECT_NEAR(grad_norm_sq(fam, mu, pi), sl::karcher_residual(mu, pi), 1e-10);
  const auto bar = sl::fixed_point_barycenter(pi);
  Matrix mean_cov = Matrix::Zero(3, 3);
  for (const auto& a : atoms) mean_cov += 0.25 * a.cov();
  EXPECT_LT(grad_norm_sq(fam, bar, pi), 1e-10 * mean_cov.trace());
}

}  // namespace
}  // namespace wbary
