#pragma once

#include <functional>
#include <vector>

#include "boundplan/geometry/rotation.hpp"
#include "boundplan/geometry/types.hpp"
#include "boundplan/planner/clothoid.hpp"

namespace boundplan {

// Rigid end-effector hull given by point offsets in the end-effector frame.
struct EndEffectorModel {
  std::vector<Vec3> hull_offsets = {Vec3::Zero()};

  std::vector<Vec3> posed(const Vec3& p, const Rotation& R) const {
    std::vector<Vec3> out;
    out.reserve(hull_offsets.size());
    for (const Vec3& l : hull_offsets) out.push_back(p + R * l);
    return out;
  }
};

// Piecewise-linear position path with piecewise-geodesic orientation,
// parametrized by arc length phi. Corner blends, when present, replace the
// via-point kinks by Euler-spiral pairs and reparametrize phi accordingly.
struct ReferencePath {
  std::vector<Vec3> via_points;   // p_0 .. p_N
  std::vector<double> knots;      // phi_0 = 0 .. phi_N
  Vec3 omega_ref = Vec3::UnitX();  // unit rotation axis
  std::vector<double> alphas;      // per-segment rotation magnitudes
  Rotation R0;
  std::vector<int> set_sequence;   // one set id per segment
  std::vector<CornerBlend> smoothing;

  int segments() const { return static_cast<int>(via_points.size()) - 1; }
  double length() const { return knots.back(); }

  // Index i with knots[i] <= phi < knots[i+1], clamped to [0, segments-1].
  int segment_index(double phi) const;

  Vec3 position(double phi) const;
  Rotation orientation(double phi) const;

  // Segment rotations R_i at the knots (R_{i+1} = Exp(a_i w) R_i).
  Rotation knot_rotation(int i) const;

  // Sets knots to the cumulative via-point distances.
  void recompute_knots();
};

// Smooths every interior via-point with an Euler-spiral pair. The blend
// extent starts at extent_factor times the shorter adjacent segment and is
// halved until `inside` accepts 50 samples of the blend; extent 0 (no blend)
// is the fallback. phi is reparametrized to arc length over the blends.
ReferencePath smooth_corners(
    const ReferencePath& path,
    const std::function<bool(int via_index, const Vec3&)>& inside,
    double extent_factor = 0.25);

}  // namespace boundplan
