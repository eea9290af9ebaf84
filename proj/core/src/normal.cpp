#include "wbary/normal.hpp"

#include <boost/math/distributions/normal.hpp>
#include <cmath>

namespace wbary {

double normal_quantile(double p) {
  static const boost::math::normal_distribution<double> standard;
  return boost::math::quantile(standard, p);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

}  // namespace wbary
