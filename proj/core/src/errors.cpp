#include "wbary/errors.hpp"

namespace wbary {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::GridMismatch: return "GridMismatch";
    case ErrorCode::EmptyBatch: return "EmptyBatch";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::NonpositiveStd: return "NonpositiveStd";
    case ErrorCode::InvalidGrid: return "InvalidGrid";
    case ErrorCode::NotSpd: return "NotSpd";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::MaxIterExceeded: return "MaxIterExceeded";
    case ErrorCode::CopulaMismatch: return "CopulaMismatch";
    case ErrorCode::GeneratorMismatch: return "GeneratorMismatch";
    case ErrorCode::RejectedSchedule: return "RejectedSchedule";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidWeights: return "InvalidWeights";
    case ErrorCode::RequiresFiniteSupport: return "RequiresFiniteSupport";
    case ErrorCode::InvalidSpec: return "InvalidSpec";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::RaggedRows: return "RaggedRows";
    case ErrorCode::NonNumeric: return "NonNumeric";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace wbary
