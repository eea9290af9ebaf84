// Independent reference computations for tests. Nothing here calls into the
// library's numerical routines.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

namespace wbary::testing {

// Phi(x) from erfc; Phi^{-1}(p) by bisection to machine precision.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double phi_inverse(double p) {
  double lo = -40.0, hi = 40.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (phi(mid) < p) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

// Midpoint rule for int_0^1 f(p) dp on n cells.
inline double integrate_levels(const std::function<double(double)>& f, std::size_t n) {
  double s = 0.0;
  for (std::size_t j = 0; j < n; ++j) s += f((static_cast<double>(j) + 0.5) / static_cast<double>(n));
  return s / static_cast<double>(n);
}

// Spacings strictly increasing in |j - centre| make a symmetric unimodal grid.
inline std::vector<double> random_symmetric_unimodal(std::size_t m, double centre, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const std::size_t half = m / 2;
  std::vector<double> gaps(half);
  // Nondecreasing outward from the centre.
  double g = 0.01 + u(rng);
  for (std::size_t i = 0; i < half; ++i) {
    gaps[i] = g;
    g += u(rng) * 0.1;
  }
  std::vector<double> q(m);
  if (m % 2 == 1) {
    q[half] = centre;
    for (std::size_t i = 0; i < half; ++i) {
      double offset = 0.0;
      for (std::size_t k = 0; k <= i; ++k) offset += gaps[k];
      q[half + 1 + i] = centre + offset;
      q[half - 1 - i] = centre - offset;
    }
  } else {
    for (std::size_t i = 0; i < half; ++i) {
      double offset = 0.5 * gaps[0];
      for (std::size_t k = 1; k <= i; ++k) offset += gaps[k];
      q[half + i] = centre + offset;
      q[half - 1 - i] = centre - offset;
    }
  }
  return q;
}

// Symmetric about `centre` but generally multimodal: random positive spacings
// mirrored around the centre.
inline std::vector<double> random_symmetric(std::size_t m, double centre, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> q(m);
  const std::size_t half = m / 2;
  double offset = (m % 2 == 1) ? 0.0 : 0.5 * u(rng);
  if (m % 2 == 1) q[half] = centre;
  for (std::size_t i = 0; i < half; ++i) {
    const std::size_t hi = (m % 2 == 1) ? half + 1 + i : half + i;
    const std::size_t lo = m - 1 - hi;
    if (i > 0 || m % 2 == 1) offset += u(rng);
    q[hi] = centre + offset;
    q[lo] = centre - offset;
  }
  return q;
}

inline std::vector<double> random_monotone(std::size_t m, std::mt19937_64& rng, double start = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> q(m);
  double x = start;
  for (auto& v : q) {
    x += u(rng);
    v = x;
  }
  return q;
}

// Asymptotic Kolmogorov critical value c(alpha)/sqrt(n); c(1e-3) = 1.9495.
inline double ks_critical_1e3(std::size_t n) { return 1.9495 / std::sqrt(static_cast<double>(n)); }

}  // namespace wbary::testing
