#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "wbary/quantile1d.hpp"
#include "wbary/scatter_location.hpp"
#include "wbary/solver.hpp"

namespace wbary {
namespace {

using Grid = QuantileGrid;

FiniteSupport<Grid> example_population(std::size_t m) {
  return FiniteSupport<Grid>({0.3, 0.7}, {quantile1d::from_gaussian(1, 1, m), quantile1d::from_gaussian(3, 1, m)});
}

FiniteSupport<Grid> random_population(std::size_t atoms, std::size_t m, Rng& rng) {
  std::vector<Grid> g;
  std::vector<double> w;
  double tot = 0.0;
  for (std::size_t i = 0; i < atoms; ++i) {
    g.push_back(quantile1d::from_gaussian(uniform(rng, -3, 3), uniform(rng, 0.3, 3), m));
    tot += w.emplace_back(uniform(rng, 0.1, 1.0));
  }
  for (auto& x : w) x /= tot;
  return FiniteSupport<Grid>(std::move(w), std::move(g));
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

TEST(SolverConfig, Validation) {
  SolverConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.batch_sizes = {};
  EXPECT_THROW(cfg.validate(), Error);
  cfg.batch_sizes = {1, 0};
  EXPECT_THROW(cfg.validate(), Error);
  cfg.batch_sizes = {1};
  cfg.max_steps = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.max_steps = 10;
  cfg.schedule = StepSchedule(ConstantStep{0.1});
  cfg.schedule_mode = ScheduleMode::Convergent;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.schedule_mode = ScheduleMode::Any;
  EXPECT_NO_THROW(cfg.validate());
  cfg.batch_sizes = {1, 4};
  EXPECT_EQ(cfg.batch_size(0), 1u);
  EXPECT_EQ(cfg.batch_size(1), 4u);
  EXPECT_EQ(cfg.batch_size(100), 4u);
}

TEST(Run, SingleAtomStopsAfterOneStep) {
  const auto m = quantile1d::from_gaussian(2, 0.5, 100);
  const PopulationModel<Grid> pi(FiniteSupport<Grid>::single(m));
  SolverConfig cfg;
  cfg.stop = {StoppingRule::Kind::GradNormBelow, 1e-12};
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, 100), cfg);
  EXPECT_EQ(rec.steps(), 1u);
  EXPECT_EQ(rec.final_measure(), m);
  EXPECT_EQ(rec.series.back().F, 0.0);
  EXPECT_EQ(rec.stop_reason, "grad_norm");
  EXPECT_EQ(rec.family, "univariate");
}

TEST(Run, WorkedExampleConverges) {
  const std::size_t m = 1000;
  const PopulationModel<Grid> pi(example_population(m));
  SolverConfig cfg;
  cfg.max_steps = 10000;
  cfg.seed = 7;
  const auto target = quantile1d::from_gaussian(2.4, 1.0, m);
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg, target);
  EXPECT_EQ(rec.steps(), 10000u);
  EXPECT_LE(rec.series.back().w2_ref, 0.05);
  EXPECT_EQ(rec.stop_reason, "max_steps");
}

TEST(Run, W2ReferenceStop) {
  const std::size_t m = 200;
  const PopulationModel<Grid> pi(example_population(m));
  SolverConfig cfg;
  cfg.max_steps = 100000;
  cfg.stop = {StoppingRule::Kind::W2ToReferenceBelow, 0.1};
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg, quantile1d::from_gaussian(2.4, 1, m));
  EXPECT_EQ(rec.stop_reason, "w2_reference");
  EXPECT_LE(rec.series.back().w2_ref, 0.1);
  SolverConfig no_ref = cfg;
  EXPECT_THROW(run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), no_ref), Error);
}

TEST(Run, BatchingReducesSpreadAcrossSeeds) {
  const std::size_t m = 200;
  const PopulationModel<Grid> pi(example_population(m));
  const auto target = quantile1d::from_gaussian(2.4, 1.0, m);
  auto spread = [&](std::size_t s) {
    std::vector<double> finals;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      SolverConfig cfg;
      cfg.max_steps = 10000;
      cfg.seed = 1000 + seed;
      cfg.batch_sizes = {s};
      finals.push_back(run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg, target).series.back().w2_ref);
    }
    double mean = 0.0;
    for (double x : finals) mean += x / 50.0;
    double var = 0.0;
    for (double x : finals) var += (x - mean) * (x - mean) / 49.0;
    return var;
  };
  EXPECT_LT(spread(16), spread(1));
}

TEST(Run, Reproducible) {
  Rng rng = make_rng(50);
  const PopulationModel<Grid> pi(random_population(5, 100, rng));
  SolverConfig cfg;
  cfg.max_steps = 300;
  cfg.seed = 99;
  cfg.batch_sizes = {1, 2, 3};
  cfg.snapshot_stride = 50;
  const auto mu0 = quantile1d::from_gaussian(0, 1, 100);
  const auto a = run(QuantileFamily{}, pi, mu0, cfg);
  const auto b = run(QuantileFamily{}, pi, mu0, cfg);
  ASSERT_EQ(a.series.size(), b.series.size());
  for (std::size_t i = 0; i < a.series.size(); ++i) {
    EXPECT_TRUE(same_bits(a.series[i].F, b.series[i].F));
    EXPECT_TRUE(same_bits(a.series[i].grad_norm_sq, b.series[i].grad_norm_sq));
    EXPECT_TRUE(same_bits(a.series[i].gamma, b.series[i].gamma));
  }
  ASSERT_EQ(a.snapshots.size(), 7u);
  for (std::size_t i = 0; i < a.snapshots.size(); ++i) EXPECT_EQ(a.snapshots[i].measure, b.snapshots[i].measure);
  cfg.seed = 100;
  EXPECT_FALSE(run(QuantileFamily{}, pi, mu0, cfg).final_measure() == a.final_measure());
}

TEST(Run, SnapshotsReproduceRecordedScalars) {
  Rng rng = make_rng(51);
  const auto fin = random_population(4, 100, rng);
  const PopulationModel<Grid> pi(fin);
  SolverConfig cfg;
  cfg.max_steps = 200;
  cfg.snapshot_stride = 20;
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, 100), cfg);
  for (const auto& snap : rec.snapshots) {
    EXPECT_EQ(functional_F(QuantileFamily{}, snap.measure, fin), rec.series[snap.k].F);
    EXPECT_EQ(grad_norm_sq(QuantileFamily{}, snap.measure, fin), rec.series[snap.k].grad_norm_sq);
  }
}

TEST(Run, FunctionalGapFallsForConvergentSchedule) {
  Rng rng = make_rng(52);
  const auto fin = random_population(6, 200, rng);
  const PopulationModel<Grid> pi(fin);
  const double f_hat = functional_F(QuantileFamily{}, quantile1d::exact_barycenter(fin), fin);
  SolverConfig cfg;
  cfg.max_steps = 10000;
  cfg.schedule = StepSchedule(PowerDecay{1.0, 1.0, 0.75});
  cfg.schedule_mode = ScheduleMode::Convergent;
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(10, 5, 200), cfg);
  const double gap0 = rec.series.front().F - f_hat;
  double running_min = gap0;
  for (const auto& s : rec.series) running_min = std::min(running_min, s.F - f_hat);
  EXPECT_LT(running_min, 1e-3 * rec.series.front().F);
}

TEST(Run, GenerativePopulation) {
  const std::size_t m = 200;
  const PopulationModel<Grid> pi(Generative<Grid>("gaussian1d", [m](Rng& r) {
    return quantile1d::from_gaussian(uniform(r, 0, 2), uniform(r, 0.5, 1.5), m);
  }));
  SolverConfig cfg;
  cfg.max_steps = 50;
  const auto rec = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg);
  EXPECT_TRUE(std::isnan(rec.series.back().F));
  cfg.mc_eval_samples = 100;
  const auto tracked = run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg);
  EXPECT_TRUE(std::isfinite(tracked.series.back().F));
  EXPECT_EQ(tracked.final_measure(), rec.final_measure());
  cfg.mc_eval_samples = 0;
  cfg.stop = {StoppingRule::Kind::GradNormBelow, 1e-3};
  EXPECT_THROW(run(QuantileFamily{}, pi, quantile1d::from_gaussian(0, 1, m), cfg), Error);
}

TEST(Estimators, SingleAtom) {
  const auto m = quantile1d::from_gaussian(1, 2, 100);
  const auto mu = quantile1d::from_gaussian(0, 1, 100);
  const PopulationModel<Grid> pi(FiniteSupport<Grid>::single(m));
  const auto est = estimate_F_and_gradnorm(QuantileFamily{}, pi, mu, 100, 1);
  EXPECT_NEAR(est.F.value, 0.5 * quantile1d::w2_sq(mu, m), 1e-14);
  EXPECT_EQ(est.F.std_error, 0.0);
  for (std::size_t s : {1u, 4u}) EXPECT_NEAR(integrated_variance(QuantileFamily{}, pi, mu, s, 200, 2).value, 0.0, 1e-14);
}

TEST(Estimators, AgreeWithExactValues) {
  Rng rng = make_rng(53);
  const auto fin = random_population(5, 200, rng);
  const PopulationModel<Grid> pi(fin);
  const auto mu = quantile1d::from_gaussian(0.5, 1.2, 200);
  const auto est = estimate_F_and_gradnorm(QuantileFamily{}, pi, mu, 10000, 3);
  EXPECT_LE(std::abs(est.F.value - quantile1d::functional_F(mu, fin)), 4 * est.F.std_error);
  EXPECT_LE(std::abs(est.grad_norm_sq.value - quantile1d::grad_norm_sq(mu, fin)), 4 * est.grad_norm_sq.std_error);
  const auto at_bar = estimate_F_and_gradnorm(QuantileFamily{}, pi, quantile1d::exact_barycenter(fin), 10000, 4);
  EXPECT_LE(std::abs(at_bar.grad_norm_sq.value), 4 * at_bar.grad_norm_sq.std_error);
}

TEST(Estimators, IntegratedVarianceLaw) {
  Rng rng = make_rng(54);
  const auto fin = random_population(4, 100, rng);
  const PopulationModel<Grid> pi(fin);
  const auto mu = quantile1d::from_gaussian(-0.5, 1.0, 100);
  const double exact = 2 * quantile1d::functional_F(mu, fin) - quantile1d::grad_norm_sq(mu, fin);
  for (std::size_t s : {1u, 2u, 4u, 8u}) {
    const auto v = integrated_variance(QuantileFamily{}, pi, mu, s, 20000, 10 + s);
    const double scaled = v.value * static_cast<double>(s);
    EXPECT_LE(std::abs(scaled - exact), 4 * v.std_error * static_cast<double>(s)) << "S = " << s;
  }
}

TEST(Estimators, IntegratedVarianceGaussianTraceForm) {
  Rng rng = make_rng(55);
  std::vector<ScatterLocationMeasure> atoms;
  for (int i = 0; i < 4; ++i) {
    Vector b(2);
    b << standard_normal(rng), standard_normal(rng);
    atoms.emplace_back(b, scatter::random_spd(2, 20.0, rng));
  }
  const auto fin = FiniteSupport<ScatterLocationMeasure>::uniform(atoms);
  const PopulationModel<ScatterLocationMeasure> pi(fin);
  const ScatterLocationMeasure mu(Vector::Zero(2), Matrix::Identity(2, 2));
  const ScatterLocationFamily fam;
  const double exact = 2 * functional_F(fam, mu, fin) - grad_norm_sq(fam, mu, fin);
  const auto v = integrated_variance(fam, pi, mu, 1, 20000, 5);
  EXPECT_LE(std::abs(v.value - exact), 4 * v.std_error);
}

TEST(Descent, SingleAtomEquality) {
  const auto m = quantile1d::from_gaussian(1, 2, 100);
  const auto mu = quantile1d::from_gaussian(0, 1, 100);
  const auto r = verify_descent_inequality(QuantileFamily{}, FiniteSupport<Grid>::single(m), mu, 1.0, 100, 1);
  const double f = 0.5 * quantile1d::w2_sq(mu, m);
  EXPECT_NEAR(r.lhs, -f, 1e-12);
  EXPECT_NEAR(r.rhs, -f, 1e-12);
  EXPECT_NEAR(r.grad_norm_sq, 2 * f, 1e-12);
  EXPECT_TRUE(r.pass);
}

TEST(Descent, RandomTrialsPass) {
  Rng rng = make_rng(56);
  for (int t = 0; t < 20; ++t) {
    const auto fin = random_population(3 + t % 4, 64, rng);
    const auto mu = quantile1d::from_gaussian(uniform(rng, -3, 3), uniform(rng, 0.3, 3), 64);
    const double gamma = uniform(rng, 0.01, 1.0);
    const auto r = verify_descent_inequality(QuantileFamily{}, fin, mu, gamma, 2000, 100 + t);
    EXPECT_TRUE(r.pass) << "trial " << t << " lhs " << r.lhs << " rhs " << r.rhs << " se " << r.lhs_std_error;
  }
}

TEST(Descent, FirstOrderInSmallSteps) {
  Rng rng = make_rng(57);
  const auto fin = random_population(5, 100, rng);
  const auto mu = quantile1d::from_gaussian(2, 2, 100);
  const double gamma = 1e-3;
  const auto r = verify_descent_inequality(QuantileFamily{}, fin, mu, gamma, 10000, 9);
  EXPECT_NEAR(r.lhs / gamma, -r.grad_norm_sq, 4 * r.lhs_std_error / gamma + 2 * gamma * r.F);
}

TEST(GradientDescent, UnitStepIsExactIn1d) {
  Rng rng = make_rng(58);
  const auto fin = random_population(5, 100, rng);
  const auto res = gradient_descent(QuantileFamily{}, fin, quantile1d::from_gaussian(0, 1, 100), 1.0, 1e-20, 5);
  EXPECT_TRUE(res.converged);
  EXPECT_EQ(res.iterations, 1u);
  EXPECT_LT(quantile1d::w2(res.measure, quantile1d::exact_barycenter(fin)), 1e-12);
}

}  // namespace
}  // namespace wbary
