#include "boundplan/geometry/rotation.hpp"

#include <cmath>

#include "boundplan/errors.hpp"

namespace boundplan {

Rotation::Rotation(const Mat3& R) : R_(R) {
  if ((R.transpose() * R - Mat3::Identity()).lpNorm<Eigen::Infinity>() > 1e-9)
    throw Error(ErrorCode::InvalidInput, "rotation: not orthonormal");
  if (std::abs(R.determinant() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidInput, "rotation: det != +1");
}

Rotation Rotation::transpose() const {
  Rotation out;
  out.R_ = R_.transpose();
  return out;
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  Rotation out;
  out.R_ = R_ * rhs.R_;
  // Re-orthonormalize to keep long products within tolerance.
  Eigen::JacobiSVD<Mat3> svd(out.R_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.R_ = svd.matrixU() * svd.matrixV().transpose();
  return out;
}

Rotation rotation_exp(const Vec3& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw Error(ErrorCode::InvalidInput, "rotation_exp: axis not unit norm");
  Mat3 K;
  K << 0, -axis.z(), axis.y(), axis.z(), 0, -axis.x(), -axis.y(), axis.x(), 0;
  Mat3 R = Mat3::Identity() + std::sin(angle) * K +
           (1.0 - std::cos(angle)) * K * K;
  Eigen::JacobiSVD<Mat3> svd(R, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return Rotation(svd.matrixU() * svd.matrixV().transpose());
}

Geodesic geodesic(const Rotation& R0, const Rotation& Rf) {
  Mat3 rel = Rf.matrix() * R0.matrix().transpose();
  Eigen::Quaterniond q(rel);
  q.normalize();
  if (q.w() < 0.0) q.coeffs() *= -1.0;

  Geodesic out;
  double vn = q.vec().norm();
  out.angle = 2.0 * std::atan2(vn, q.w());
  if (vn < 1e-12 || out.angle < 1e-12) {
    out.identity = true;
    out.angle = 0.0;
    out.axis = Vec3::UnitX();
    return out;
  }
  out.axis = q.vec() / vn;
  out.antipodal = out.angle > M_PI - 1e-6;
  return out;
}

}  // namespace boundplan
