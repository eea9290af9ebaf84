#include "wbary/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "wbary/errors.hpp"

namespace wbary {

double StepSchedule::gamma(std::size_t k) const {
  if (const auto* c = std::get_if<ConstantStep>(&kind_)) return c->gamma;
  const auto& p = std::get<PowerDecay>(kind_);
  const double base = static_cast<double>(k) + p.offset;
  if (base <= 0.0) return 1.0;
  return std::min(1.0, p.scale * std::pow(base, -p.exponent));
}

std::string StepSchedule::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (const auto* c = std::get_if<ConstantStep>(&kind_)) {
    os << "constant(gamma=" << c->gamma << ")";
  } else {
    const auto& p = std::get<PowerDecay>(kind_);
    os << "power(scale=" << p.scale << ",offset=" << p.offset << ",exponent=" << p.exponent << ")";
  }
  return os.str();
}

void validate_schedule(const StepSchedule& schedule, ScheduleMode mode) {
  auto reject = [](const std::string& why) { throw Error(ErrorCode::RejectedSchedule, why); };

  if (const auto* c = std::get_if<ConstantStep>(&schedule.kind())) {
    if (!(c->gamma > 0.0 && c->gamma <= 1.0)) reject("constant step must lie in (0, 1]");
    if (mode == ScheduleMode::Convergent) reject("constant step: sum of gamma_k^2 diverges");
    return;
  }

  const auto& p = std::get<PowerDecay>(schedule.kind());
  if (!std::isfinite(p.scale) || p.scale <= 0.0) reject("power decay scale must be > 0");
  if (!std::isfinite(p.offset) || p.offset < 0.0) reject("power decay offset must be >= 0");
  if (!std::isfinite(p.exponent) || p.exponent < 0.0) reject("power decay exponent must be >= 0");
  if (mode == ScheduleMode::Convergent) {
    if (p.exponent <= 0.5) reject("exponent <= 1/2: sum of gamma_k^2 diverges");
    if (p.exponent > 1.0) reject("exponent > 1: sum of gamma_k converges");
  }
}

}  // namespace wbary
