#include "wbary/solver.hpp"

namespace wbary {

void SolverConfig::validate() const {
  validate_schedule(schedule, schedule_mode);
  if (max_steps < 1) throw Error(ErrorCode::InvalidConfig, "max_steps must be >= 1");
  if (batch_sizes.empty()) throw Error(ErrorCode::InvalidConfig, "batch size list is empty");
  for (std::size_t s : batch_sizes)
    if (s < 1) throw Error(ErrorCode::InvalidConfig, "batch sizes must be >= 1");
  if (stop.kind != StoppingRule::Kind::MaxSteps && !(stop.tol >= 0.0))
    throw Error(ErrorCode::InvalidConfig, "stopping tolerance must be >= 0");
}

}  // namespace wbary
