#pragma once

#include "boundplan/geometry/types.hpp"

namespace boundplan {

enum class QpStatus { Optimal, Infeasible, MaxIter };

struct QpResult {
  QpStatus status = QpStatus::MaxIter;
  VecX x;
  VecX lambda;    // multipliers of G x <= h
  double objective = 0.0;
};

// minimize 1/2 x^T H x + g^T x  subject to  G x <= h.
// H must be positive semidefinite; a tiny diagonal regularization is added
// internally. Primal-dual interior point with Mehrotra-style steps,
// infeasible start allowed.
QpResult solve_qp(const MatX& H, const VecX& g, const MatX& G, const VecX& h,
                  int max_iter = 80, double tol = 1e-10);

}  // namespace boundplan
