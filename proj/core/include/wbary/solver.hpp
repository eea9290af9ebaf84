#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "wbary/errors.hpp"
#include "wbary/family.hpp"
#include "wbary/population.hpp"
#include "wbary/rng.hpp"
#include "wbary/schedule.hpp"

namespace wbary {

struct StoppingRule {
  enum class Kind { MaxSteps, GradNormBelow, W2ToReferenceBelow };
  Kind kind = Kind::MaxSteps;
  // GradNormBelow stops once sqrt(grad_norm_sq) <= tol; W2ToReferenceBelow
  // once w2(mu_k, reference) <= tol.
  double tol = 0.0;
};

struct SolverConfig {
  StepSchedule schedule = StepSchedule::harmonic();
  ScheduleMode schedule_mode = ScheduleMode::Any;
  // One entry: constant batch size. Several: S_k for k < size, the last
  // entry repeats afterwards.
  std::vector<std::size_t> batch_sizes{1};
  std::size_t max_steps = 1000;
  std::uint64_t seed = 0;
  // Snapshot every `snapshot_stride` steps (0: initial and final only).
  std::size_t snapshot_stride = 0;
  StoppingRule stop;
  // Monte Carlo draws used to track F and ||F'||^2 for generative
  // populations; 0 records NaN instead.
  std::size_t mc_eval_samples = 0;

  std::size_t batch_size(std::size_t k) const {
    return k < batch_sizes.size() ? batch_sizes[k] : batch_sizes.back();
  }

  // Throws InvalidConfig or RejectedSchedule.
  void validate() const;
};

struct StepScalars {
  std::size_t k = 0;
  double gamma = 0.0;
  std::size_t batch_size = 1;
  double F = std::numeric_limits<double>::quiet_NaN();
  double grad_norm_sq = std::numeric_limits<double>::quiet_NaN();
  double w2_ref = std::numeric_limits<double>::quiet_NaN();
};

template <class M>
struct Snapshot {
  std::size_t k;
  M measure;
};

// One entry of `series` per visited iterate, the initial one included;
// gamma and batch_size are those of the step leaving that iterate.
template <class M>
struct RunRecord {
  std::string family;
  std::uint64_t seed = 0;
  std::string schedule;
  double wall_time_s = 0.0;
  std::string stop_reason;
  std::vector<StepScalars> series;
  std::vector<Snapshot<M>> snapshots;

  std::size_t steps() const { return series.empty() ? 0 : series.size() - 1; }
  const M& final_measure() const { return snapshots.back().measure; }
};

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

struct FunctionalEstimate {
  Estimate F;
  Estimate grad_norm_sq;
};

struct DescentReport {
  double F = 0.0;             // F(mu_k)
  double grad_norm_sq = 0.0;  // ||F'(mu_k)||^2
  double lhs = 0.0;           // estimate of E[F(mu_{k+1}) - F(mu_k) | F_k]
  double lhs_std_error = 0.0;
  double rhs = 0.0;           // gamma^2 F - gamma ||F'||^2
  bool pass = false;
};

namespace detail {

inline double mean_of(const std::vector<double>& xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

// Shifted by the first sample so a constant sample has exactly zero spread.
inline Estimate summarize(const std::vector<double>& xs) {
  Estimate e;
  const double shift = xs.front();
  double s = 0.0;
  for (double x : xs) s += x - shift;
  const double d = s / static_cast<double>(xs.size());
  e.value = shift + d;
  if (xs.size() < 2) {
    e.std_error = std::numeric_limits<double>::infinity();
    return e;
  }
  double ss = 0.0;
  for (double x : xs) ss += (x - shift - d) * (x - shift - d);
  e.std_error = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  return e;
}

inline std::size_t group_count(std::size_t n) { return std::max<std::size_t>(1, std::min<std::size_t>(32, n / 2)); }

// Draws of T_mu^m - I (and W2^2(mu, m)) for m ~ Pi. Finite populations
// precompute one displacement per atom and then only draw indices, which
// consumes the generator exactly like PopulationModel::draw.
template <BarycenterFamily Fam>
class DisplacementSampler {
 public:
  using M = typename Fam::Measure;
  using T = typename Fam::Tangent;

  DisplacementSampler(const Fam& fam, const PopulationModel<M>& pi, const M& mu) : fam_(fam), pi_(pi), mu_(mu) {
    if (pi.is_finite()) {
      const auto& f = pi.finite();
      for (const auto& atom : f.atoms()) {
        logs_.push_back(fam.log_map(mu, atom));
        const double d = fam.w2(mu, atom);
        costs_.push_back(d * d);
      }
    }
  }

  // Returns the displacement and writes W2^2 to `cost`.
  T draw(Rng& rng, double& cost) const {
    if (pi_.is_finite()) {
      const std::size_t i = pi_.finite().draw_index(rng);
      cost = costs_[i];
      return logs_[i];
    }
    const M m = pi_.draw(rng);
    const double d = fam_.w2(mu_, m);
    cost = d * d;
    return fam_.log_map(mu_, m);
  }

 private:
  const Fam& fam_;
  const PopulationModel<M>& pi_;
  const M& mu_;
  std::vector<T> logs_;
  std::vector<double> costs_;
};

}  // namespace detail

// Monte Carlo estimates of F(mu) and ||F'(mu)||^2. The gradient-norm
// estimate is unbiased: within each of up to 32 groups,
// (||sum D_i||^2 - sum ||D_i||^2) / (n (n - 1)) estimates ||E D||^2, and the
// standard error comes from the spread across groups.
template <BarycenterFamily Fam>
FunctionalEstimate estimate_F_and_gradnorm(const Fam& fam, const PopulationModel<typename Fam::Measure>& pi,
                                           const typename Fam::Measure& mu, std::size_t n_mc, std::uint64_t seed) {
  if (n_mc < 2) throw Error(ErrorCode::InvalidConfig, "n_mc must be >= 2");
  Rng rng = make_rng(seed);
  detail::DisplacementSampler<Fam> sampler(fam, pi, mu);
  const std::size_t groups = detail::group_count(n_mc);

  std::vector<double> half_costs;
  half_costs.reserve(n_mc);
  std::vector<double> group_g;
  group_g.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t n_g = n_mc / groups + (g < n_mc % groups ? 1 : 0);
    auto sum = fam.zero_tangent(mu);
    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n_g; ++i) {
      double cost = 0.0;
      const auto d = sampler.draw(rng, cost);
      half_costs.push_back(0.5 * cost);
      sum_sq += fam.norm_sq(mu, d);
      fam.axpy(sum, 1.0, d);
    }
    const double n = static_cast<double>(n_g);
    group_g.push_back((fam.norm_sq(mu, sum) - sum_sq) / (n * (n - 1.0)));
  }
  FunctionalEstimate out;
  out.F = detail::summarize(half_costs);
  out.grad_norm_sq = detail::summarize(group_g);
  return out;
}

// Integrated variance of the batch-S gradient estimator -(1/S) sum (T - I):
// per group the unbiased sample variance of the replicate estimators
// (centered at the group's first replicate), averaged over groups.
template <BarycenterFamily Fam>
Estimate integrated_variance(const Fam& fam, const PopulationModel<typename Fam::Measure>& pi,
                             const typename Fam::Measure& mu, std::size_t batch_size, std::size_t n_mc,
                             std::uint64_t seed) {
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");
  if (n_mc < 2) throw Error(ErrorCode::InvalidConfig, "n_mc must be >= 2");
  Rng rng = make_rng(seed);
  detail::DisplacementSampler<Fam> sampler(fam, pi, mu);
  const std::size_t groups = detail::group_count(n_mc);
  const double inv_s = 1.0 / static_cast<double>(batch_size);

  auto draw_estimator = [&]() {
    auto d = fam.zero_tangent(mu);
    double unused = 0.0;
    for (std::size_t i = 0; i < batch_size; ++i) fam.axpy(d, inv_s, sampler.draw(rng, unused));
    return d;
  };

  std::vector<double> group_var;
  group_var.reserve(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t n_g = n_mc / groups + (g < n_mc % groups ? 1 : 0);
    const auto anchor = draw_estimator();
    auto sum = fam.zero_tangent(mu);
    double sum_sq = 0.0;
    for (std::size_t i = 1; i < n_g; ++i) {
      auto d = draw_estimator();
      fam.axpy(d, -1.0, anchor);
      sum_sq += fam.norm_sq(mu, d);
      fam.axpy(sum, 1.0, d);
    }
    // The anchor contributes a zero deviation.
    const double n = static_cast<double>(n_g);
    group_var.push_back((sum_sq - fam.norm_sq(mu, sum) / n) / (n - 1.0));
  }
  return detail::summarize(group_var);
}

// Estimates E[F(mu_{k+1}) - F(mu_k) | F_k] by drawing n_mc fresh batches at
// mu_k and compares it to gamma^2 F - gamma ||F'||^2. Passes iff
// lhs <= rhs + z * SE(lhs), with a rounding allowance of 1e-12 max(1, F).
template <BarycenterFamily Fam>
DescentReport verify_descent_inequality(const Fam& fam, const FiniteSupport<typename Fam::Measure>& pi,
                                        const typename Fam::Measure& mu, double gamma, std::size_t n_mc,
                                        std::uint64_t seed, double z = 3.0, std::size_t batch_size = 1) {
  using M = typename Fam::Measure;
  if (n_mc < 100) throw Error(ErrorCode::InvalidConfig, "n_mc must be >= 100");
  if (batch_size == 0) throw Error(ErrorCode::InvalidConfig, "batch size must be >= 1");
  DescentReport r;
  r.F = functional_F(fam, mu, pi);
  r.grad_norm_sq = grad_norm_sq(fam, mu, pi);
  r.rhs = gamma * gamma * r.F - gamma * r.grad_norm_sq;

  Rng rng = make_rng(seed);
  // With one draw per step, mu_{k+1} depends only on the drawn atom.
  std::vector<std::optional<double>> cached(pi.size());
  std::vector<double> diffs;
  diffs.reserve(n_mc);
  std::vector<M> batch;
  for (std::size_t s = 0; s < n_mc; ++s) {
    if (batch_size == 1) {
      const std::size_t i = pi.draw_index(rng);
      if (!cached[i]) {
        const std::vector<M> one{pi.atom(i)};
        cached[i] = functional_F(fam, fam.sgd_step(mu, one, gamma), pi);
      }
      diffs.push_back(*cached[i] - r.F);
    } else {
      batch.clear();
      for (std::size_t b = 0; b < batch_size; ++b) batch.push_back(pi.atom(pi.draw_index(rng)));
      diffs.push_back(functional_F(fam, fam.sgd_step(mu, batch, gamma), pi) - r.F);
    }
  }
  const Estimate e = detail::summarize(diffs);
  r.lhs = e.value;
  r.lhs_std_error = e.std_error;
  r.pass = r.lhs <= r.rhs + z * r.lhs_std_error + 1e-12 * std::max(1.0, r.F);
  return r;
}

template <class M>
struct DescentResult {
  M measure;
  double residual;
  std::size_t iterations;
  bool converged;
  std::vector<double> residual_history;
};

// Deterministic gradient descent mu <- G_gamma(mu) on a finite population
// until karcher_residual < tol; gamma = 1 is the fixed-point iteration.
template <BarycenterFamily Fam>
DescentResult<typename Fam::Measure> gradient_descent(const Fam& fam, const FiniteSupport<typename Fam::Measure>& pi,
                                                      typename Fam::Measure mu0, double gamma, double tol,
                                                      std::size_t max_iter) {
  DescentResult<typename Fam::Measure> out{std::move(mu0), 0.0, 0, false, {}};
  out.residual = karcher_residual(fam, out.measure, pi);
  out.residual_history.push_back(out.residual);
  while (out.residual >= tol && out.iterations < max_iter) {
    out.measure = gradient_step(fam, out.measure, pi, gamma);
    out.residual = karcher_residual(fam, out.measure, pi);
    out.residual_history.push_back(out.residual);
    ++out.iterations;
  }
  out.converged = out.residual < tol;
  return out;
}

namespace detail {

template <BarycenterFamily Fam>
StepScalars evaluate(const Fam& fam, const PopulationModel<typename Fam::Measure>& pi, const typename Fam::Measure& mu,
                     const std::optional<typename Fam::Measure>& reference, const SolverConfig& cfg, std::size_t k) {
  StepScalars s;
  s.k = k;
  s.gamma = cfg.schedule.gamma(k);
  s.batch_size = cfg.batch_size(k);
  if (pi.is_finite()) {
    s.F = functional_F(fam, mu, pi.finite());
    s.grad_norm_sq = grad_norm_sq(fam, mu, pi.finite());
  } else if (cfg.mc_eval_samples >= 2) {
    const auto est = estimate_F_and_gradnorm(fam, pi, mu, cfg.mc_eval_samples, cfg.seed ^ (0x9e3779b97f4a7c15ULL * (k + 1)));
    s.F = est.F.value;
    s.grad_norm_sq = est.grad_norm_sq.value;
  }
  if (reference) s.w2_ref = fam.w2(mu, *reference);
  return s;
}

}  // namespace detail

// Runs mu_{k+1} = sgd_step(mu_k, batch_k, gamma_k), batch_k ~ Pi^{S_k} iid.
// Bit-reproducible from (seed, cfg, pi, mu0).
template <BarycenterFamily Fam>
RunRecord<typename Fam::Measure> run(const Fam& fam, const PopulationModel<typename Fam::Measure>& pi,
                                     typename Fam::Measure mu0, const SolverConfig& cfg,
                                     const std::optional<typename Fam::Measure>& reference = std::nullopt) {
  cfg.validate();
  if (cfg.stop.kind == StoppingRule::Kind::W2ToReferenceBelow && !reference)
    throw Error(ErrorCode::InvalidConfig, "w2-to-reference stopping needs a reference measure");
  if (cfg.stop.kind == StoppingRule::Kind::GradNormBelow && !pi.is_finite() && cfg.mc_eval_samples < 2)
    throw Error(ErrorCode::InvalidConfig, "grad-norm stopping on a generative population needs mc_eval_samples");

  const auto start = std::chrono::steady_clock::now();
  RunRecord<typename Fam::Measure> rec;
  rec.family = std::string(Fam::kName);
  rec.seed = cfg.seed;
  rec.schedule = cfg.schedule.describe();

  Rng rng = make_rng(cfg.seed);
  auto mu = std::move(mu0);

  auto should_stop = [&](const StepScalars& s) -> const char* {
    switch (cfg.stop.kind) {
      case StoppingRule::Kind::GradNormBelow:
        return std::sqrt(s.grad_norm_sq) <= cfg.stop.tol ? "grad_norm" : nullptr;
      case StoppingRule::Kind::W2ToReferenceBelow:
        return s.w2_ref <= cfg.stop.tol ? "w2_reference" : nullptr;
      case StoppingRule::Kind::MaxSteps:
        return nullptr;
    }
    return nullptr;
  };

  rec.snapshots.push_back({0, mu});
  rec.series.push_back(detail::evaluate(fam, pi, mu, reference, cfg, 0));
  const char* reason = should_stop(rec.series.back());
  std::size_t k = 0;
  while (!reason && k < cfg.max_steps) {
    const auto batch = sample_batch(pi, cfg.batch_size(k), rng);
    mu = fam.sgd_step(mu, batch, cfg.schedule.gamma(k));
    ++k;
    rec.series.push_back(detail::evaluate(fam, pi, mu, reference, cfg, k));
    reason = should_stop(rec.series.back());
    if (cfg.snapshot_stride > 0 && k % cfg.snapshot_stride == 0) rec.snapshots.push_back({k, mu});
  }
  if (rec.snapshots.back().k != k) rec.snapshots.push_back({k, std::move(mu)});
  rec.stop_reason = reason ? reason : "max_steps";
  rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rec;
}

}  // namespace wbary
