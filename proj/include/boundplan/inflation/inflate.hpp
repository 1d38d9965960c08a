#pragma once

#include <vector>

#include "boundplan/geometry/convex_body.hpp"
#include "boundplan/geometry/ellipsoid.hpp"
#include "boundplan/geometry/polytope.hpp"

namespace boundplan {

struct InflationConfig {
  int max_iterations = 10;
  double volume_rel_tol = 1e-2;
  double obstacle_margin = 0.0;  // meters
};

// Bounded planning domain with convex obstacles given as vertex hulls.
struct Workspace {
  ConvexPolytope domain;
  std::vector<ConvexBody> obstacles;
};

enum class InflateMode { Mvie, MvieFixedMid };

struct InflationResult {
  ConvexPolytope set;
  Ellipsoid ellipsoid;
  int iterations = 0;
};

// One tangent half-space per not-yet-separated obstacle, processed in order
// of increasing ellipsoid-metric distance, plus the domain rows. The result
// contains the ellipsoid and excludes every obstacle interior.
ConvexPolytope separating_polytope(const Ellipsoid& e, const Workspace& ws,
                                   double margin = 0.0);

// Alternates separating_polytope and mvie (or mvie_fixed_mid at the seed)
// until the relative ellipsoid volume gain drops below cfg.volume_rel_tol.
InflationResult inflate(const Vec3& seed, const Workspace& ws,
                        InflateMode mode, const InflationConfig& cfg = {});

// Collision-free set around the convex hull of the given points: one
// half-space through the closest obstacle point per unseparated obstacle
// (Set-convex-hull), retracted by margin, plus the domain rows.
ConvexPolytope set_convex_hull(const ConvexBody& points, const Workspace& ws,
                               double margin = 0.0);

}  // namespace boundplan
