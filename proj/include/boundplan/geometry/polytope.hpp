#pragma once

#include <Eigen/Dense>

#include "boundplan/geometry/types.hpp"

namespace boundplan {

// Half-space intersection {x : A x <= b} with unit-norm rows.
class ConvexPolytope {
 public:
  ConvexPolytope() = default;

  // Rows are normalized at construction so that b is a metric distance.
  // Throws on a (near-)zero row.
  ConvexPolytope(const Eigen::MatrixX3d& A, const VecX& b);

  static ConvexPolytope axis_aligned_box(const Vec3& lo, const Vec3& hi);

  int rows() const { return static_cast<int>(A_.rows()); }
  const Eigen::MatrixX3d& A() const { return A_; }
  const VecX& b() const { return b_; }

  // A x - b, elementwise. x is a member iff all entries <= tol.
  VecX halfspace_distances(const Vec3& x) const;
  bool contains(const Vec3& x, double tol = 1e-9) const;

  // Concatenates constraint rows; redundant rows may remain.
  ConvexPolytope intersect(const ConvexPolytope& other) const;

 private:
  Eigen::MatrixX3d A_{0, 3};
  VecX b_{0};
};

struct ChebyshevResult {
  bool empty = false;
  double radius = 0.0;  // negative when empty
  Vec3 center = Vec3::Zero();
};

// Chebyshev-center LP: maximize the inscribed-ball radius. The polytope is
// treated as empty iff the optimal radius < -1e-9. An unbounded LP is
// reported as non-empty with a feasible witness.
ChebyshevResult chebyshev_center(const ConvexPolytope& poly);

inline bool is_empty(const ConvexPolytope& poly) {
  return chebyshev_center(poly).empty;
}

// Bounded in every +-axis direction (LP in each direction).
bool is_bounded(const ConvexPolytope& poly);

}  // namespace boundplan
