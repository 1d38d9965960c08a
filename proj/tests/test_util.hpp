#pragma once

#include <random>
#include <vector>

#include "boundplan/geometry/convex_body.hpp"
#include "boundplan/inflation/inflate.hpp"

namespace bptest {

using boundplan::ConvexBody;
using boundplan::ConvexPolytope;
using boundplan::Vec3;
using boundplan::Workspace;

inline std::vector<Vec3> box_vertices(const Vec3& lo, const Vec3& hi) {
  std::vector<Vec3> v;
  for (int i = 0; i < 8; ++i)
    v.emplace_back(i & 1 ? hi.x() : lo.x(), i & 2 ? hi.y() : lo.y(),
                   i & 4 ? hi.z() : lo.z());
  return v;
}

// Random workspace: unit-cube domain with up to max_obstacles random boxes.
inline Workspace random_workspace(std::mt19937_64& rng, int max_obstacles,
                                  double max_extent = 0.25) {
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  Workspace ws;
  ws.domain = ConvexPolytope::axis_aligned_box(Vec3::Zero(), Vec3::Ones());
  std::uniform_int_distribution<int> count(0, max_obstacles);
  int k = count(rng);
  for (int i = 0; i < k; ++i) {
    Vec3 lo(uni(rng), uni(rng), uni(rng));
    Vec3 ext(uni(rng), uni(rng), uni(rng));
    Vec3 hi = (lo + max_extent * ext).cwiseMin(Vec3::Ones());
    ws.obstacles.emplace_back(box_vertices(lo, hi));
  }
  return ws;
}

// Uniform point inside the obstacle's bounding box, rejected into the hull
// via membership on boxes (all test obstacles are boxes).
inline Vec3 random_point_in_box(std::mt19937_64& rng, const ConvexBody& box) {
  Vec3 lo = box.vertices().front(), hi = lo;
  for (const Vec3& v : box.vertices()) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  return lo + Vec3(uni(rng) * (hi - lo).x(), uni(rng) * (hi - lo).y(),
                   uni(rng) * (hi - lo).z());
}

// At least one row of the set pushes all obstacle vertices outside.
inline bool excludes_obstacle(const ConvexPolytope& set,
                              const ConvexBody& obstacle, double tol = 1e-9) {
  for (int r = 0; r < set.rows(); ++r) {
    bool all_out = true;
    for (const Vec3& v : obstacle.vertices()) {
      if (set.A().row(r).dot(v) < set.b()[r] - tol) {
        all_out = false;
        break;
      }
    }
    if (all_out) return true;
  }
  return false;
}

}  // namespace bptest
