#pragma once

#include <cstddef>
#include <string>
#include <variant>

namespace wbary {

// gamma_k = min(1, scale * (k + offset)^(-exponent)); a zero base maps to 1.
struct PowerDecay {
  double scale = 1.0;
  double offset = 1.0;
  double exponent = 1.0;
};

struct ConstantStep {
  double gamma = 0.1;
};

enum class ScheduleMode { Any, Convergent };

class StepSchedule {
 public:
  StepSchedule() = default;
  StepSchedule(PowerDecay p) : kind_(p) {}  // NOLINT(google-explicit-constructor)
  StepSchedule(ConstantStep c) : kind_(c) {}  // NOLINT(google-explicit-constructor)

  static StepSchedule harmonic() { return PowerDecay{1.0, 1.0, 1.0}; }

  double gamma(std::size_t k) const;

  bool is_constant() const { return std::holds_alternative<ConstantStep>(kind_); }
  const std::variant<PowerDecay, ConstantStep>& kind() const { return kind_; }

  std::string describe() const;

 private:
  std::variant<PowerDecay, ConstantStep> kind_ = PowerDecay{};
};

// Throws Error(RejectedSchedule) with the reason. In Convergent mode only
// PowerDecay with exponent in (1/2, 1] is accepted: then sum gamma_k^2 < inf
// and sum gamma_k = inf.
void validate_schedule(const StepSchedule& schedule, ScheduleMode mode);

}  // namespace wbary
