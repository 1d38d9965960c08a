#pragma once

#include <stdexcept>
#include <string>

namespace boundplan {

enum class ErrorCode {
  InvalidInput,
  EmptySet,
  Unbounded,
  SeedNotInterior,
  SeedInCollision,
  SeedOutsideDomain,
  HullInCollision,
  NoPath,
  ExplorationSaturated,
  BudgetExceeded,
  PathInfeasible,
  PredictedCollision,
  TunnelViolation,
  StartInCollision,
  GoalInCollision,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what, int index = -1)
      : std::runtime_error(what), code_(code), index_(index) {}

  ErrorCode code() const { return code_; }
  // Offending obstacle/set index when applicable, -1 otherwise.
  int index() const { return index_; }

 private:
  ErrorCode code_;
  int index_;
};

}  // namespace boundplan
