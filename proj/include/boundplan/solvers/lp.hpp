#pragma once

#include "boundplan/geometry/types.hpp"

namespace boundplan {

enum class LpStatus { Optimal, Unbounded, Infeasible };

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  VecX x;
  double objective = 0.0;
};

// maximize c^T x  subject to  G x <= h, x free.
// Dense two-phase simplex; intended for small problems (a handful of
// variables, up to a few hundred rows).
LpResult solve_lp(const VecX& c, const MatX& G, const VecX& h);

}  // namespace boundplan
