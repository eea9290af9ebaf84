#pragma once

#include <concepts>
#include <cstddef>
#include <span>
#include <string_view>

#include "wbary/population.hpp"

namespace wbary {

// A geometry in which optimal maps between members are explicit.
//
// Tangent holds the displacement T_mu^m - I expressed in the family's own
// coordinates; norm_sq(mu, v) is its squared L^2(mu) norm. weighted_step
// applies (1 - gamma) I + gamma * sum_i w_i T_mu^{m_i} and pushes mu forward.
template <class F>
concept BarycenterFamily =
    requires(const F& fam, const typename F::Measure& mu, const typename F::Tangent& v,
             typename F::Tangent& acc, std::span<const typename F::Measure> atoms,
             std::span<const double> weights, double gamma,
             const FiniteSupport<typename F::Measure>& pi) {
      { F::kName } -> std::convertible_to<std::string_view>;
      { fam.w2(mu, mu) } -> std::convertible_to<double>;
      { fam.log_map(mu, mu) } -> std::same_as<typename F::Tangent>;
      { fam.zero_tangent(mu) } -> std::same_as<typename F::Tangent>;
      fam.axpy(acc, gamma, v);
      { fam.norm_sq(mu, v) } -> std::convertible_to<double>;
      { fam.weighted_step(mu, atoms, weights, gamma) } -> std::same_as<typename F::Measure>;
      { fam.sgd_step(mu, atoms, gamma) } -> std::same_as<typename F::Measure>;
      { fam.exact_barycenter(pi) } -> std::same_as<typename F::Measure>;
    };

// F(mu) = 1/2 sum_i lambda_i W2^2(mu, m_i). Families may supply a faster
// functional_F of their own.
template <BarycenterFamily Fam>
double functional_F(const Fam& fam, const typename Fam::Measure& mu,
                    const FiniteSupport<typename Fam::Measure>& pi) {
  if constexpr (requires { fam.functional_F(mu, pi); }) {
    return fam.functional_F(mu, pi);
  } else {
    double acc = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
      const double d = fam.w2(mu, pi.atom(i));
      acc += pi.weight(i) * d * d;
    }
    return 0.5 * acc;
  }
}

// -F'(mu) = sum_i lambda_i (T_mu^{m_i} - I).
template <BarycenterFamily Fam>
typename Fam::Tangent negative_gradient(const Fam& fam, const typename Fam::Measure& mu,
                                        const FiniteSupport<typename Fam::Measure>& pi) {
  auto g = fam.zero_tangent(mu);
  for (std::size_t i = 0; i < pi.size(); ++i) fam.axpy(g, pi.weight(i), fam.log_map(mu, pi.atom(i)));
  return g;
}

// ||F'(mu)||^2 in L^2(mu); families may supply a closed form.
template <BarycenterFamily Fam>
double grad_norm_sq(const Fam& fam, const typename Fam::Measure& mu,
                    const FiniteSupport<typename Fam::Measure>& pi) {
  if constexpr (requires { fam.grad_norm_sq(mu, pi); }) {
    return fam.grad_norm_sq(mu, pi);
  } else {
    return fam.norm_sq(mu, negative_gradient(fam, mu, pi));
  }
}

// Zero exactly at Karcher means: the Pi-average of the optimal maps is the identity.
template <BarycenterFamily Fam>
double karcher_residual(const Fam& fam, const typename Fam::Measure& mu,
                        const FiniteSupport<typename Fam::Measure>& pi) {
  return grad_norm_sq(fam, mu, pi);
}

// One full-gradient step G_gamma(mu); gamma = 1 is the fixed-point map G.
template <BarycenterFamily Fam>
typename Fam::Measure gradient_step(const Fam& fam, const typename Fam::Measure& mu,
                                    const FiniteSupport<typename Fam::Measure>& pi, double gamma) {
  return fam.weighted_step(mu, pi.atoms(), pi.weights(), gamma);
}

}  // namespace wbary
