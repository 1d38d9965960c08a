#include "boundplan/inflation/inflate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "boundplan/errors.hpp"
#include "boundplan/inflation/mvie.hpp"

namespace boundplan {
namespace {

ConvexPolytope assemble(const std::vector<Vec3>& normals,
                        const std::vector<double>& offsets,
                        const ConvexPolytope& domain) {
  const int m = static_cast<int>(normals.size());
  Eigen::MatrixX3d A(m + domain.rows(), 3);
  VecX b(m + domain.rows());
  for (int i = 0; i < m; ++i) {
    A.row(i) = normals[static_cast<size_t>(i)].transpose();
    b[i] = offsets[static_cast<size_t>(i)];
  }
  A.bottomRows(domain.rows()) = domain.A();
  b.tail(domain.rows()) = domain.b();
  return ConvexPolytope(A, b);
}

// Obstacle fully on the far side of a^T x >= b + margin?
bool separated_by(const ConvexBody& obstacle, const Vec3& a, double b,
                  double margin) {
  for (const Vec3& v : obstacle.vertices())
    if (a.dot(v) < b + margin - 1e-12) return false;
  return true;
}

bool separated_by_any(const ConvexBody& obstacle,
                      const std::vector<Vec3>& normals,
                      const std::vector<double>& offsets, double margin) {
  for (size_t i = 0; i < normals.size(); ++i)
    if (separated_by(obstacle, normals[i], offsets[i], margin)) return true;
  return false;
}

}  // namespace

ConvexPolytope separating_polytope(const Ellipsoid& e, const Workspace& ws,
                                   double margin) {
  const int K = static_cast<int>(ws.obstacles.size());
  Mat3 Cinv = e.C.inverse();

  // Closest obstacle points in the ellipsoid metric ||C^-1 (x - p)||.
  std::vector<Vec3> touch(static_cast<size_t>(K));
  std::vector<double> dist(static_cast<size_t>(K));
  ConvexBody origin({Vec3::Zero()});
  for (int k = 0; k < K; ++k) {
    std::vector<Vec3> mapped;
    for (const Vec3& v : ws.obstacles[static_cast<size_t>(k)].vertices())
      mapped.push_back(Cinv * (v - e.p));
    auto cp = closest_points(ConvexBody(std::move(mapped)), origin);
    if (cp.distance <= 1.0 + 1e-12)
      throw Error(ErrorCode::SeedInCollision,
                  "separating_polytope: ellipsoid overlaps obstacle", k);
    dist[static_cast<size_t>(k)] = cp.distance;
    touch[static_cast<size_t>(k)] = e.p + e.C * cp.point_a;
  }

  std::vector<int> order(static_cast<size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return dist[static_cast<size_t>(a)] <
                                       dist[static_cast<size_t>(b)]; });

  std::vector<Vec3> normals;
  std::vector<double> offsets;
  for (int k : order) {
    const ConvexBody& obs = ws.obstacles[static_cast<size_t>(k)];
    if (separated_by_any(obs, normals, offsets, margin)) continue;
    const Vec3& x = touch[static_cast<size_t>(k)];
    // Tangent to the scaled ellipsoid through the touching point.
    Vec3 a = Cinv.transpose() * (Cinv * (x - e.p));
    a.normalize();
    double b = a.dot(x) - margin;
    if ((e.C * a).norm() + a.dot(e.p) > b + 1e-9)
      throw Error(ErrorCode::SeedInCollision,
                  "separating_polytope: margin cuts the ellipsoid", k);
    normals.push_back(a);
    offsets.push_back(b);
  }
  return assemble(normals, offsets, ws.domain);
}

InflationResult inflate(const Vec3& seed, const Workspace& ws,
                        InflateMode mode, const InflationConfig& cfg) {
  if (!ws.domain.contains(seed, 1e-9))
    throw Error(ErrorCode::SeedOutsideDomain, "inflate: seed outside domain");

  ConvexBody seed_body({seed});
  double clearance = -ws.domain.halfspace_distances(seed).maxCoeff();
  for (size_t k = 0; k < ws.obstacles.size(); ++k) {
    double d = closest_points(seed_body, ws.obstacles[k]).distance;
    if (d <= cfg.obstacle_margin + 1e-12)
      throw Error(ErrorCode::SeedInCollision, "inflate: seed in collision",
                  static_cast<int>(k));
    clearance = std::min(clearance, d - cfg.obstacle_margin);
  }

  double r0 = std::min(1e-4, 0.5 * clearance);
  r0 = std::max(r0, 1e-9);
  Ellipsoid e(r0 * Mat3::Identity(), seed);

  InflationResult out;
  double prev_logdet = e.logdet();
  for (int it = 0; it < cfg.max_iterations; ++it) {
    out.set = separating_polytope(e, ws, cfg.obstacle_margin);
    e = (mode == InflateMode::MvieFixedMid) ? mvie_fixed_mid(out.set, seed)
                                            : mvie(out.set);
    out.iterations = it + 1;
    double logdet = e.logdet();
    // MVIE volume is non-decreasing up to solver accuracy: the new set
    // contains the previous ellipsoid by construction.
    if (logdet < prev_logdet - 1e-4)
      throw Error(ErrorCode::InvalidInput, "inflate: volume decreased");
    if (std::expm1(logdet - prev_logdet) < cfg.volume_rel_tol) {
      prev_logdet = logdet;
      break;
    }
    prev_logdet = logdet;
  }
  out.ellipsoid = e;
  return out;
}

ConvexPolytope set_convex_hull(const ConvexBody& points, const Workspace& ws,
                               double margin) {
  const int K = static_cast<int>(ws.obstacles.size());
  std::vector<ClosestPair> pairs(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    pairs[static_cast<size_t>(k)] =
        closest_points(points, ws.obstacles[static_cast<size_t>(k)]);
    if (pairs[static_cast<size_t>(k)].distance < margin + 1e-12)
      throw Error(ErrorCode::HullInCollision,
                  "set_convex_hull: hull in collision with obstacle", k);
  }

  std::vector<int> order(static_cast<size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pairs[static_cast<size_t>(a)].distance <
           pairs[static_cast<size_t>(b)].distance;
  });

  std::vector<Vec3> normals;
  std::vector<double> offsets;
  for (int k : order) {
    const ConvexBody& obs = ws.obstacles[static_cast<size_t>(k)];
    if (separated_by_any(obs, normals, offsets, margin)) continue;
    const auto& cp = pairs[static_cast<size_t>(k)];
    Vec3 a = (cp.point_b - cp.point_a) / cp.distance;  // toward the obstacle
    // Touch the obstacle, then retract by the margin.
    normals.push_back(a);
    offsets.push_back(a.dot(cp.point_b) - margin);
  }
  return assemble(normals, offsets, ws.domain);
}

}  // namespace boundplan
