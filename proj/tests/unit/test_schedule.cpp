#include <gtest/gtest.h>

#include <cmath>

#include "wbary/errors.hpp"
#include "wbary/schedule.hpp"

namespace wbary {
namespace {

ErrorCode code_of(const StepSchedule& s, ScheduleMode mode) {
  try {
    validate_schedule(s, mode);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::InvalidConfig;  // sentinel: accepted
}

bool accepted(const StepSchedule& s, ScheduleMode mode) {
  try {
    validate_schedule(s, mode);
    return true;
  } catch (const Error&) {
    return false;
  }
}

TEST(StepSchedule, HarmonicIsOneOverKPlusOne) {
  const auto s = StepSchedule::harmonic();
  for (std::size_t k = 0; k < 100; ++k) EXPECT_DOUBLE_EQ(s.gamma(k), 1.0 / static_cast<double>(k + 1));
  EXPECT_TRUE(accepted(s, ScheduleMode::Convergent));
}

TEST(StepSchedule, ConstantRejectedInConvergentMode) {
  const StepSchedule s = ConstantStep{0.1};
  EXPECT_EQ(code_of(s, ScheduleMode::Convergent), ErrorCode::RejectedSchedule);
  EXPECT_TRUE(accepted(s, ScheduleMode::Any));
}

TEST(StepSchedule, ExponentRange) {
  EXPECT_TRUE(accepted(PowerDecay{1.0, 0.0, 0.75}, ScheduleMode::Convergent));
  EXPECT_FALSE(accepted(PowerDecay{1.0, 1.0, 0.5}, ScheduleMode::Convergent));
  EXPECT_FALSE(accepted(PowerDecay{1.0, 1.0, 0.3}, ScheduleMode::Convergent));
  EXPECT_FALSE(accepted(PowerDecay{1.0, 1.0, 1.2}, ScheduleMode::Convergent));
  EXPECT_TRUE(accepted(PowerDecay{1.0, 1.0, 1.2}, ScheduleMode::Any));
  EXPECT_FALSE(accepted(PowerDecay{0.0, 1.0, 1.0}, ScheduleMode::Any));
  EXPECT_FALSE(accepted(ConstantStep{1.5}, ScheduleMode::Any));
  EXPECT_FALSE(accepted(ConstantStep{0.0}, ScheduleMode::Any));
}

TEST(StepSchedule, StepsStayInUnitInterval) {
  const StepSchedule zero_offset = PowerDecay{1.0, 0.0, 0.75};
  EXPECT_EQ(zero_offset.gamma(0), 1.0);
  const StepSchedule big_scale = PowerDecay{5.0, 1.0, 1.0};
  for (std::size_t k = 0; k < 1000; ++k) {
    EXPECT_GT(big_scale.gamma(k), 0.0);
    EXPECT_LE(big_scale.gamma(k), 1.0);
  }
}

// Partial sums up to 10^6 agree with the validator: for accepted exponents
// the decade increments of sum gamma^2 shrink geometrically (ratio
// 10^(1 - 2 theta) < 1) while those of sum gamma do not shrink; for rejected
// exponents one of the two fails.
TEST(StepSchedule, DecisionsMatchPartialSumEvidence) {
  for (double theta : {0.3, 0.5, 0.6, 0.75, 0.9, 1.0, 1.3}) {
    const StepSchedule s = PowerDecay{1.0, 1.0, theta};
    double sum = 0.0, sum_sq = 0.0;
    std::vector<double> decade_sum, decade_sq;
    double last_sum = 0.0, last_sq = 0.0;
    std::size_t next = 10;
    for (std::size_t k = 0; k < 1000000; ++k) {
      const double g = s.gamma(k);
      sum += g;
      sum_sq += g * g;
      if (k + 1 == next) {
        decade_sum.push_back(sum - last_sum);
        decade_sq.push_back(sum_sq - last_sq);
        last_sum = sum;
        last_sq = sum_sq;
        next *= 10;
      }
    }
    const std::size_t n = decade_sq.size();
    const double sq_ratio = decade_sq[n - 1] / decade_sq[n - 2];
    const double sum_ratio = decade_sum[n - 1] / decade_sum[n - 2];
    const bool evidence_convergent = sq_ratio < 0.95 && sum_ratio >= 0.99;
    EXPECT_EQ(evidence_convergent, accepted(s, ScheduleMode::Convergent)) << "theta=" << theta;
  }
}

}  // namespace
}  // namespace wbary
