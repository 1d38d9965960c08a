#include "boundplan/errors.hpp"

namespace boundplan {

const char* error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::Unbounded: return "Unbounded";
    case ErrorCode::SeedNotInterior: return "SeedNotInterior";
    case ErrorCode::SeedInCollision: return "SeedInCollision";
    case ErrorCode::SeedOutsideDomain: return "SeedOutsideDomain";
    case ErrorCode::HullInCollision: return "HullInCollision";
    case ErrorCode::NoPath: return "NoPath";
    case ErrorCode::ExplorationSaturated: return "ExplorationSaturated";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::PathInfeasible: return "PathInfeasible";
    case ErrorCode::PredictedCollision: return "PredictedCollision";
    case ErrorCode::TunnelViolation: return "TunnelViolation";
    case ErrorCode::StartInCollision: return "StartInCollision";
    case ErrorCode::GoalInCollision: return "GoalInCollision";
  }
  return "Unknown";
}

}  // namespace boundplan
