#include "boundplan/inflation/mvie.hpp"

#include <cmath>

#include "boundplan/errors.hpp"

namespace boundplan {
namespace {

// Parameter vector: [c11, c22, c33, c12, c13, c23, (px, py, pz)].
Mat3 unpack_shape(const VecX& th) {
  Mat3 C;
  C << th[0], th[3], th[4], th[3], th[1], th[5], th[4], th[5], th[2];
  return C;
}

void add_sym_grad(VecX& grad, const Mat3& M, double factor) {
  grad[0] += factor * M(0, 0);
  grad[1] += factor * M(1, 1);
  grad[2] += factor * M(2, 2);
  grad[3] += factor * 2.0 * M(0, 1);
  grad[4] += factor * 2.0 * M(0, 2);
  grad[5] += factor * 2.0 * M(1, 2);
}

struct Barrier {
  const ConvexPolytope& poly;
  bool fix_center;
  Vec3 center;  // used when fix_center
  double t = 1.0;

  int dim() const { return fix_center ? 6 : 9; }

  Vec3 point(const VecX& th) const {
    return fix_center ? center : Vec3(th.tail<3>());
  }

  // Slacks s_k = b_k - a_k^T p - ||C a_k||; all must stay positive.
  bool slacks(const VecX& th, VecX& s) const {
    Mat3 C = unpack_shape(th);
    Eigen::LLT<Mat3> llt(C);
    if (llt.info() != Eigen::Success) return false;
    Vec3 p = point(th);
    s.resize(poly.rows());
    for (int k = 0; k < poly.rows(); ++k) {
      Vec3 a = poly.A().row(k).transpose();
      s[k] = poly.b()[k] - a.dot(p) - (C * a).norm();
      if (s[k] <= 0.0) return false;
    }
    return true;
  }

  double value(const VecX& th) const {
    VecX s;
    if (!slacks(th, s)) return 1e100;
    Mat3 C = unpack_shape(th);
    Eigen::LLT<Mat3> llt(C);
    double logdet = 2.0 * std::log(llt.matrixL().determinant());
    return -t * logdet - s.array().log().sum();
  }

  VecX gradient(const VecX& th) const {
    Mat3 C = unpack_shape(th);
    Mat3 Cinv = C.inverse();
    VecX grad = VecX::Zero(dim());
    add_sym_grad(grad, Cinv, -t);
    Vec3 p = point(th);
    for (int k = 0; k < poly.rows(); ++k) {
      Vec3 a = poly.A().row(k).transpose();
      double n = (C * a).norm();
      double s = poly.b()[k] - a.dot(p) - n;
      Mat3 M = C * (a * a.transpose()) + (a * a.transpose()) * C;
      add_sym_grad(grad, M / (2.0 * n), 1.0 / s);
      if (!fix_center) grad.tail<3>() += a / s;
    }
    return grad;
  }

  MatX fd_hessian(const VecX& th) const {
    const int n = dim();
    MatX H(n, n);
    const double h = 1e-6;
    for (int j = 0; j < n; ++j) {
      VecX lo = th, hi = th;
      hi[j] += h;
      lo[j] -= h;
      H.col(j) = (gradient(hi) - gradient(lo)) / (2.0 * h);
    }
    return 0.5 * (H + H.transpose());
  }
};

VecX newton_minimize(const Barrier& barrier, VecX th) {
  for (int iter = 0; iter < 60; ++iter) {
    VecX grad = barrier.gradient(th);
    MatX H = barrier.fd_hessian(th);
    double damp = 1e-10;
    VecX step;
    for (;;) {
      Eigen::LDLT<MatX> ldlt(H + damp * MatX::Identity(H.rows(), H.cols()));
      step = ldlt.solve(-grad);
      if (grad.dot(step) < 0.0) break;
      damp *= 100.0;
      if (damp > 1e8) {
        step = -grad;
        break;
      }
    }
    double f0 = barrier.value(th);
    double alpha = 1.0;
    bool moved = false;
    for (int ls = 0; ls < 50; ++ls) {
      VecX cand = th + alpha * step;
      double f = barrier.value(cand);
      if (f < f0 - 1e-12 * std::abs(f0)) {
        th = cand;
        moved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!moved || grad.norm() * alpha < 1e-11 * (1.0 + barrier.t)) break;
  }
  return th;
}

Ellipsoid solve(const ConvexPolytope& poly, bool fix_center,
                const Vec3& center) {
  if (poly.rows() == 0) throw Error(ErrorCode::Unbounded, "mvie: no rows");

  VecX th;
  Barrier barrier{poly, fix_center, center};
  if (fix_center) {
    VecX d = poly.halfspace_distances(center);
    if (d.maxCoeff() >= -1e-9)
      throw Error(ErrorCode::SeedNotInterior,
                  "mvie_fixed_mid: center not strictly interior");
    if (!is_bounded(poly))
      throw Error(ErrorCode::Unbounded, "mvie_fixed_mid: unbounded polytope");
    double r0 = 0.5 * (-d.maxCoeff());
    th = VecX::Zero(6);
    th[0] = th[1] = th[2] = r0;
  } else {
    auto cc = chebyshev_center(poly);
    if (cc.empty || cc.radius <= 1e-9)
      throw Error(ErrorCode::EmptySet, "mvie: empty or degenerate polytope");
    if (!is_bounded(poly))
      throw Error(ErrorCode::Unbounded, "mvie: unbounded polytope");
    th = VecX::Zero(9);
    th[0] = th[1] = th[2] = 0.5 * cc.radius;
    th.tail<3>() = cc.center;
  }

  // Central path: suboptimality in logdet is bounded by rows/t.
  const double t_final = 1e9 * poly.rows();
  for (barrier.t = 1.0; barrier.t < t_final; barrier.t *= 20.0)
    th = newton_minimize(barrier, th);
  barrier.t = t_final;
  th = newton_minimize(barrier, th);

  return Ellipsoid(unpack_shape(th), barrier.point(th));
}

}  // namespace

Ellipsoid mvie(const ConvexPolytope& poly) {
  return solve(poly, false, Vec3::Zero());
}

Ellipsoid mvie_fixed_mid(const ConvexPolytope& poly, const Vec3& p) {
  return solve(poly, true, p);
}

}  // namespace boundplan
