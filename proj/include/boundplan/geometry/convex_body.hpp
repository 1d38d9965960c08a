#pragma once

#include <vector>

#include "boundplan/geometry/types.hpp"

namespace boundplan {

// Convex hull of a non-empty vertex list. Duplicates within 1e-12 are
// dropped at construction.
class ConvexBody {
 public:
  explicit ConvexBody(std::vector<Vec3> vertices);

  const std::vector<Vec3>& vertices() const { return vertices_; }
  int size() const { return static_cast<int>(vertices_.size()); }

  Vec3 support(const Vec3& direction) const;

 private:
  std::vector<Vec3> vertices_;
};

struct ClosestPair {
  Vec3 point_a = Vec3::Zero();
  Vec3 point_b = Vec3::Zero();
  double distance = 0.0;
};

// Closest points between two convex hulls (GJK). When the hulls intersect,
// distance is 0 and point_a == point_b is a common point.
ClosestPair closest_points(const ConvexBody& a, const ConvexBody& b);

// Closest point on the segment [s0, s1] to hull(body), analytically reduced
// to a point query via the segment-parameter projection.
ClosestPair closest_segment_body(const Vec3& s0, const Vec3& s1,
                                 const ConvexBody& body);

}  // namespace boundplan
