#pragma once

#include "boundplan/geometry/types.hpp"

namespace boundplan {

// Orthonormal 3x3 matrix with det +1, checked at construction.
class Rotation {
 public:
  Rotation() : R_(Mat3::Identity()) {}
  explicit Rotation(const Mat3& R);

  static Rotation identity() { return Rotation(); }

  const Mat3& matrix() const { return R_; }
  Rotation transpose() const;
  Rotation operator*(const Rotation& rhs) const;
  Vec3 operator*(const Vec3& v) const { return R_ * v; }

 private:
  Mat3 R_;
};

// Rodrigues formula. The axis must be unit norm within 1e-9.
Rotation rotation_exp(const Vec3& axis, double angle);

struct Geodesic {
  Vec3 axis = Vec3::UnitX();
  double angle = 0.0;  // in [0, pi]
  bool identity = false;
  bool antipodal = false;
};

// Axis/angle of Rf * R0^T. angle == 0 returns axis (1,0,0) with the
// identity flag; angle == pi returns a valid axis with the antipodal flag.
Geodesic geodesic(const Rotation& R0, const Rotation& Rf);

}  // namespace boundplan
