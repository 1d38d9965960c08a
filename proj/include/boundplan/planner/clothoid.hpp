#pragma once

#include "boundplan/geometry/types.hpp"

namespace boundplan {

// Integrals (int_0^s cos(k t^2) dt, int_0^s sin(k t^2) dt), accurate to
// better than 1e-9 for |k| s^2 up to a few pi.
struct FresnelPair {
  double c = 0.0;
  double s = 0.0;
};
FresnelPair fresnel(double k, double s);

// Symmetric Euler-spiral pair replacing the corner at `corner` between the
// incoming direction u and outgoing direction v (both unit). The blend
// starts at corner - trim * u and ends at corner + trim * v, with curvature
// ramping linearly up to the midpoint and back down.
struct CornerBlend {
  int via_index = -1;
  Vec3 corner = Vec3::Zero();
  Vec3 u = Vec3::UnitX();  // incoming direction
  Vec3 v = Vec3::UnitX();  // outgoing direction
  double trim = 0.0;       // straight-line distance removed on each side
  double half_arc = 0.0;   // arc length of each spiral half
  double turn = 0.0;       // total turn angle
};

// Builds the blend for a given trim distance; the half arc length follows
// from the scale invariance of the spiral.
CornerBlend make_corner_blend(int via_index, const Vec3& corner,
                              const Vec3& u, const Vec3& v, double trim);

// Point on the blend at arc parameter s in [0, 2 * half_arc].
Vec3 blend_point(const CornerBlend& blend, double s);

}  // namespace boundplan
