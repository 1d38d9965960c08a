#pragma once

#include "boundplan/geometry/types.hpp"

namespace boundplan {

// Ellipsoid {p + C u : ||u|| <= 1} with C symmetric positive definite.
struct Ellipsoid {
  Mat3 C = Mat3::Identity();
  Vec3 p = Vec3::Zero();

  Ellipsoid() = default;
  Ellipsoid(const Mat3& shape, const Vec3& center);

  double det() const { return C.determinant(); }
  double logdet() const;

  // Mahalanobis-style distance ||C^-1 (x - p)||; <= 1 inside.
  double metric_distance(const Vec3& x) const;
};

}  // namespace boundplan
