#include "boundplan/geometry/polytope.hpp"

#include "boundplan/errors.hpp"
#include "boundplan/solvers/lp.hpp"

namespace boundplan {

ConvexPolytope::ConvexPolytope(const Eigen::MatrixX3d& A, const VecX& b)
    : A_(A), b_(b) {
  if (A.rows() != b.size())
    throw Error(ErrorCode::InvalidInput, "polytope: A/b size mismatch");
  for (int i = 0; i < A_.rows(); ++i) {
    double n = A_.row(i).norm();
    if (n < 1e-12)
      throw Error(ErrorCode::InvalidInput, "polytope: zero-norm row");
    A_.row(i) /= n;
    b_[i] /= n;
  }
}

ConvexPolytope ConvexPolytope::axis_aligned_box(const Vec3& lo,
                                                const Vec3& hi) {
  Eigen::MatrixX3d A(6, 3);
  VecX b(6);
  for (int k = 0; k < 3; ++k) {
    A.row(2 * k) = Vec3::Unit(k).transpose();
    b[2 * k] = hi[k];
    A.row(2 * k + 1) = -Vec3::Unit(k).transpose();
    b[2 * k + 1] = -lo[k];
  }
  return ConvexPolytope(A, b);
}

VecX ConvexPolytope::halfspace_distances(const Vec3& x) const {
  return A_ * x - b_;
}

bool ConvexPolytope::contains(const Vec3& x, double tol) const {
  if (rows() == 0) return true;
  return (halfspace_distances(x).array() <= tol).all();
}

ConvexPolytope ConvexPolytope::intersect(const ConvexPolytope& other) const {
  Eigen::MatrixX3d A(rows() + other.rows(), 3);
  VecX b(rows() + other.rows());
  A << A_, other.A_;
  b << b_, other.b_;
  return ConvexPolytope(A, b);
}

ChebyshevResult chebyshev_center(const ConvexPolytope& poly) {
  const int m = poly.rows();
  ChebyshevResult out;
  if (m == 0) return out;  // whole space, center at origin

  // max r  s.t.  a_s^T x + r <= b_s, r <= r_cap (keeps the LP bounded).
  const double r_cap = 1e6;
  MatX G(m + 1, 4);
  VecX h(m + 1);
  G.block(0, 0, m, 3) = poly.A();
  G.block(0, 3, m, 1).setOnes();
  h.head(m) = poly.b();
  G.row(m) << 0, 0, 0, 1;
  h[m] = r_cap;
  VecX c = VecX::Zero(4);
  c[3] = 1.0;

  LpResult lp = solve_lp(c, G, h);
  if (lp.status == LpStatus::Infeasible) {
    // a^T x + r <= b is always feasible for r -> -inf, so this cannot
    // happen for well-formed input; treat as empty.
    out.empty = true;
    out.radius = -1.0;
    return out;
  }
  out.center = lp.x.head<3>();
  out.radius = lp.x[3];
  out.empty = out.radius < -1e-9;
  return out;
}

bool is_bounded(const ConvexPolytope& poly) {
  if (poly.rows() == 0) return false;
  MatX G = poly.A();
  VecX h = poly.b();
  for (int k = 0; k < 3; ++k) {
    for (double sign : {1.0, -1.0}) {
      VecX c = VecX::Zero(3);
      c[k] = sign;
      if (solve_lp(c, G, h).status == LpStatus::Unbounded) return false;
    }
  }
  return true;
}

}  // namespace boundplan
