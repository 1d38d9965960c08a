#include "boundplan/geometry/ellipsoid.hpp"

#include <cmath>

#include "boundplan/errors.hpp"

namespace boundplan {

Ellipsoid::Ellipsoid(const Mat3& shape, const Vec3& center)
    : C(shape), p(center) {
  if ((C - C.transpose()).lpNorm<Eigen::Infinity>() > 1e-9)
    throw Error(ErrorCode::InvalidInput, "ellipsoid: C not symmetric");
  C = 0.5 * (C + C.transpose());
  Eigen::SelfAdjointEigenSolver<Mat3> es(C);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw Error(ErrorCode::InvalidInput, "ellipsoid: C not positive definite");
}

double Ellipsoid::logdet() const {
  Eigen::SelfAdjointEigenSolver<Mat3> es(C);
  return es.eigenvalues().array().log().sum();
}

double Ellipsoid::metric_distance(const Vec3& x) const {
  return (C.ldlt().solve(x - p)).norm();
}

}  // namespace boundplan
