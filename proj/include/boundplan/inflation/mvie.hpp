#pragma once

#include "boundplan/geometry/ellipsoid.hpp"
#include "boundplan/geometry/polytope.hpp"

namespace boundplan {

// Maximum-volume inscribed ellipsoid of a bounded non-empty polytope.
// Containment holds as ||C a_s|| + a_s^T p <= b_s + 1e-7 on every row.
// Throws EmptySet / Unbounded.
Ellipsoid mvie(const ConvexPolytope& poly);

// MVIE variant with the center pinned to p; p must be strictly interior
// (all halfspace distances < -1e-9), otherwise SeedNotInterior.
Ellipsoid mvie_fixed_mid(const ConvexPolytope& poly, const Vec3& p);

}  // namespace boundplan
