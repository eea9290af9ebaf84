#pragma once

namespace wbary {

// Standard normal quantile Phi^{-1}(p), p in (0, 1).
double normal_quantile(double p);

// Standard normal distribution function Phi(x).
double normal_cdf(double x);

}  // namespace wbary
