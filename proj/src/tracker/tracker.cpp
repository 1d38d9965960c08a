#include "boundplan/tracker/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "boundplan/errors.hpp"
#include "boundplan/solvers/qp.hpp"

namespace boundplan {
namespace {

// Nearest path parameter to p within [lo, hi]: coarse grid plus
// golden-section polish.
double local_project(const ReferencePath& path, const Vec3& p, double lo,
                     double hi) {
  lo = std::clamp(lo, 0.0, path.length());
  hi = std::clamp(hi, 0.0, path.length());
  if (hi - lo < 1e-12) return lo;
  auto dist = [&](double phi) { return (path.position(phi) - p).norm(); };
  const int grid = 24;
  int best = 0;
  double best_val = dist(lo);
  for (int k = 1; k <= grid; ++k) {
    double val = dist(lo + (hi - lo) * k / grid);
    if (val < best_val) {
      best_val = val;
      best = k;
    }
  }
  double x1 = lo + (hi - lo) * std::max(0, best - 1) / grid;
  double x2 = lo + (hi - lo) * std::min(grid, best + 1) / grid;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = x2 - inv_phi * (x2 - x1);
  double d = x1 + inv_phi * (x2 - x1);
  double fc = dist(c), fd = dist(d);
  while (x2 - x1 > 1e-9) {
    if (fc < fd) {
      x2 = d;
      d = c;
      fd = fc;
      c = x2 - inv_phi * (x2 - x1);
      fc = dist(c);
    } else {
      x1 = c;
      c = d;
      fc = fd;
      d = x1 + inv_phi * (x2 - x1);
      fd = dist(d);
    }
  }
  return 0.5 * (x1 + x2);
}

Vec3 clamp_axes(const Vec3& v, double limit) {
  return v.cwiseMax(-limit).cwiseMin(limit);
}

}  // namespace

TrackerState make_tracker_state(const Vec3& position, const Vec3& velocity,
                                const ReferencePath& path,
                                const TrackerConfig& cfg) {
  TrackerState state;
  state.position = position;
  state.velocity = velocity;
  state.phi = local_project(path, position, 0.0, path.length());
  state.active_segment = path.segment_index(state.phi);
  state.horizon.assign(size_t(cfg.horizon_steps), position);
  state.horizon_phi.assign(size_t(cfg.horizon_steps), state.phi);
  return state;
}

std::vector<ConvexPolytope> path_sets(const ReferencePath& path,
                                      const SetGraph& graph) {
  std::vector<ConvexPolytope> sets;
  for (int id : path.set_sequence) sets.push_back(graph.set(id));
  return sets;
}

int split_index(const TrackerState& state, const ReferencePath& path,
                const std::vector<ConvexPolytope>& sets, int segment,
                double eps_phi) {
  const int M = static_cast<int>(state.horizon.size());
  if (segment + 1 >= path.segments()) return M + 1;
  const double boundary = path.knots[size_t(segment + 1)];
  for (int m = 1; m <= M; ++m) {
    const Vec3& p = state.horizon[size_t(m - 1)];
    if (state.horizon_phi[size_t(m - 1)] > boundary - eps_phi &&
        sets[size_t(segment)].contains(p, 1e-7) &&
        sets[size_t(segment + 1)].contains(p, 1e-7))
      return m;
  }
  return M + 1;
}

ConvexPolytope collision_set_for_point(const Vec3& p_now, const Vec3& p_hend,
                                       const Workspace& ws, double margin) {
  const int K = static_cast<int>(ws.obstacles.size());
  std::vector<ClosestPair> pairs(static_cast<size_t>(K));
  for (int k = 0; k < K; ++k) {
    pairs[size_t(k)] =
        closest_segment_body(p_now, p_hend, ws.obstacles[size_t(k)]);
    if (pairs[size_t(k)].distance < margin + 1e-12)
      throw Error(ErrorCode::PredictedCollision,
                  "collision_set_for_point: motion segment hits obstacle", k);
  }

  std::vector<int> order(static_cast<size_t>(K));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return pairs[size_t(a)].distance < pairs[size_t(b)].distance;
  });

  std::vector<Vec3> normals;
  std::vector<double> offsets;
  auto separated = [&](const ConvexBody& obs) {
    for (size_t i = 0; i < normals.size(); ++i) {
      bool all_out = true;
      for (const Vec3& v : obs.vertices())
        if (normals[i].dot(v) < offsets[i] + margin - 1e-12) {
          all_out = false;
          break;
        }
      if (all_out) return true;
    }
    return false;
  };
  for (int k : order) {
    const ConvexBody& obs = ws.obstacles[size_t(k)];
    if (separated(obs)) continue;
    const auto& cp = pairs[size_t(k)];
    Vec3 a = (cp.point_b - cp.point_a) / cp.distance;
    normals.push_back(a);
    offsets.push_back(a.dot(cp.point_b) - margin);
  }

  const int m = static_cast<int>(normals.size());
  Eigen::MatrixX3d A(m + ws.domain.rows(), 3);
  VecX b(m + ws.domain.rows());
  for (int r = 0; r < m; ++r) {
    A.row(r) = normals[size_t(r)].transpose();
    b[r] = offsets[size_t(r)];
  }
  A.bottomRows(ws.domain.rows()) = ws.domain.A();
  b.tail(ws.domain.rows()) = ws.domain.b();
  return ConvexPolytope(A, b);
}

void update_collision_sets(TrackerState& state, const Workspace& ws,
                           const ReferencePath& path,
                           const TrackerConfig& cfg) {
  state.collision_sets.clear();
  if (cfg.collision_points.empty()) return;
  Rotation R_now = path.orientation(state.phi);
  Rotation R_end = path.orientation(state.horizon_phi.back());
  const Vec3& p_end = state.horizon.back();
  for (const auto& cp : cfg.collision_points) {
    Vec3 now = state.position + R_now * cp.offset;
    Vec3 end = p_end + R_end * cp.offset;
    state.collision_sets.push_back(
        collision_set_for_point(now, end, ws, cp.margin));
  }
}

StepResult step(TrackerState& state, const ReferencePath& path,
                const std::vector<ConvexPolytope>& sets, const Workspace& ws,
                const TrackerConfig& cfg) {
  const int M = cfg.horizon_steps;
  const double dt = cfg.dt;
  const int N = path.segments();
  const int i = state.active_segment;
  const Vec3 p1 = state.position;
  const Vec3 v1 = state.velocity;

  if (sets[size_t(i)].halfspace_distances(p1).maxCoeff() > 1e-4)
    throw Error(ErrorCode::TunnelViolation,
                "step: position left the assigned set", i);
  const Rotation R_now = path.orientation(state.phi);
  double tunnel_violation = -std::numeric_limits<double>::infinity();
  for (const Vec3& l : cfg.ee.hull_offsets)
    tunnel_violation =
        std::max(tunnel_violation,
                 sets[size_t(i)].halfspace_distances(p1 + R_now * l).maxCoeff());

  update_collision_sets(state, ws, path, cfg);

  StepResult out;
  out.split_index = split_index(state, path, sets, i, cfg.eps_phi);
  const bool splits = out.split_index <= M;

  // Reference targets march along the path at a fraction of the axis speed.
  const double v_ref = 0.9 * cfg.v_max;
  std::vector<double> phi_ref(size_t(M + 1), state.phi);
  for (int m = 2; m <= M; ++m)
    phi_ref[size_t(m)] =
        std::min(state.phi + (m - 1) * dt * v_ref, path.length());

  const int nv = 3 * (M - 1);
  MatX H = 2e-4 * MatX::Identity(nv, nv);
  VecX g = VecX::Zero(nv);

  // p_m = p1 + (m-1) dt v1 + sum_k dt^2 (m-k-1/2) a_k, k = 1..m-1.
  auto base_pos = [&](int m) { return Vec3(p1 + (m - 1) * dt * v1); };
  auto pos_coeff = [&](int m, int k) { return dt * dt * (m - k - 0.5); };

  for (int m = 2; m <= M; ++m) {
    MatX C = MatX::Zero(3, nv);
    for (int k = 1; k < m; ++k)
      C.block<3, 3>(0, 3 * (k - 1)) = pos_coeff(m, k) * Mat3::Identity();
    Vec3 ref = path.position(phi_ref[size_t(m)]);
    H += 2.0 * cfg.deviation_weight * C.transpose() * C;
    g += 2.0 * cfg.deviation_weight * C.transpose() * (base_pos(m) - ref);
    if (m == M) {
      // Progress term: push the horizon end along the path tangent, fading
      // out near the goal.
      double h = std::max(1e-6, 1e-3 * path.length());
      double phiM = phi_ref[size_t(M)];
      Vec3 tangent = path.position(std::min(phiM + h, path.length())) -
                     path.position(std::max(phiM - h, 0.0));
      if (tangent.norm() > 1e-12) {
        tangent.normalize();
        double remaining = path.length() - state.phi;
        double scale =
            std::min(1.0, remaining / std::max(1e-9, cfg.v_max * M * dt));
        g -= cfg.progress_weight * scale * C.transpose() * tangent;
      }
    }
  }

  std::vector<Eigen::RowVectorXd> grows;
  std::vector<double> hvals;
  auto add_pos_row = [&](int m, const Vec3& a, double rhs) {
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
    for (int k = 1; k < m; ++k)
      row.segment<3>(3 * (k - 1)) = pos_coeff(m, k) * a.transpose();
    grows.push_back(row);
    hvals.push_back(rhs - a.dot(base_pos(m)));
  };

  // Acceleration and velocity boxes.
  for (int k = 1; k < M; ++k) {
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      row[3 * (k - 1) + axis] = 1.0;
      grows.push_back(row);
      hvals.push_back(cfg.a_max);
      grows.push_back(-row);
      hvals.push_back(cfg.a_max);
    }
  }
  for (int m = 2; m <= M; ++m) {
    for (int axis = 0; axis < 3; ++axis) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      for (int k = 1; k < m; ++k) row[3 * (k - 1) + axis] = dt;
      grows.push_back(row);
      hvals.push_back(cfg.v_max - v1[axis]);
      grows.push_back(-row);
      hvals.push_back(cfg.v_max + v1[axis]);
    }
  }

  // Tunnel constraints for every hull point, with the precomputed split,
  // relaxed by the current violation so a boundary start stays feasible.
  const double relax = std::max(0.0, tunnel_violation) + 1e-9;
  for (int m = 2; m <= M; ++m) {
    const ConvexPolytope& poly =
        (splits && m >= out.split_index) ? sets[size_t(i + 1)]
                                         : sets[size_t(i)];
    Rotation R_m = path.orientation(phi_ref[size_t(m)]);
    for (const Vec3& l : cfg.ee.hull_offsets) {
      Vec3 off = R_m * l;
      for (int s = 0; s < poly.rows(); ++s) {
        Vec3 a = poly.A().row(s).transpose();
        add_pos_row(m, a, poly.b()[s] + relax - a.dot(off));
      }
    }
  }

  // Terminal constraint: keep the horizon end near the next transition
  // region so the following set remains reachable.
  const int last_seg = splits ? i + 1 : i;
  if (last_seg + 1 < N) {
    ConvexPolytope inter =
        sets[size_t(last_seg)].intersect(sets[size_t(last_seg + 1)]);
    double delta = std::max(
        cfg.eps_phi, inter.halfspace_distances(p1).maxCoeff() + 1e-9);
    for (int s = 0; s < inter.rows(); ++s)
      add_pos_row(M, inter.A().row(s).transpose(), inter.b()[s] + delta);
  }

  // Collision sets for the tracked points.
  for (size_t r = 0; r < state.collision_sets.size(); ++r) {
    const auto& poly = state.collision_sets[r];
    const Vec3& l = cfg.collision_points[r].offset;
    Vec3 now_off = path.orientation(state.phi) * l;
    double now_violation =
        (poly.halfspace_distances(p1 + now_off)).maxCoeff();
    double slack = std::max(0.0, now_violation) + 1e-9;
    for (int m = 2; m <= M; ++m) {
      Vec3 off = path.orientation(phi_ref[size_t(m)]) * l;
      for (int s = 0; s < poly.rows(); ++s) {
        Vec3 a = poly.A().row(s).transpose();
        add_pos_row(m, a, poly.b()[s] + slack - a.dot(off));
      }
    }
  }

  MatX G(static_cast<int>(grows.size()), nv);
  VecX h(static_cast<int>(grows.size()));
  for (size_t r = 0; r < grows.size(); ++r) {
    G.row(static_cast<int>(r)) = grows[r];
    h[static_cast<int>(r)] = hvals[r];
  }
  auto qp = solve_qp(H, g, G, h, 100);

  std::vector<Vec3> accels(size_t(M - 1), Vec3::Zero());
  if (qp.status == QpStatus::Optimal) {
    for (int k = 1; k < M; ++k)
      accels[size_t(k - 1)] = Vec3(qp.x.segment<3>(3 * (k - 1)));
  } else {
    // Brake as hard as the limits allow; horizon follows the braking arc.
    out.degraded = true;
    Vec3 v = v1;
    for (int k = 1; k < M; ++k) {
      accels[size_t(k - 1)] = clamp_axes(-v / dt, cfg.a_max);
      v += dt * accels[size_t(k - 1)];
    }
  }
  out.acceleration = accels[0];

  // Roll the dynamics forward and shift the horizon by one step.
  std::vector<Vec3> traj(size_t(M + 1));
  traj[0] = p1;
  Vec3 v = v1;
  for (int k = 1; k <= M; ++k) {
    Vec3 a = (k <= M - 1) ? accels[size_t(k - 1)] : Vec3::Zero();
    traj[size_t(k)] = traj[size_t(k - 1)] + dt * v + 0.5 * dt * dt * a;
    v += dt * a;
  }
  state.position = traj[1];
  state.velocity = v1 + dt * accels[0];
  state.time += dt;
  state.degraded = out.degraded;
  for (int m = 1; m <= M; ++m) state.horizon[size_t(m - 1)] = traj[size_t(m)];

  // Re-project the horizon onto the path, monotone in m.
  double window = 3.0 * cfg.v_max * dt + 1e-6;
  double prev = state.phi;
  for (int m = 0; m < M; ++m) {
    double phi =
        local_project(path, state.horizon[size_t(m)], prev, prev + window);
    state.horizon_phi[size_t(m)] = phi;
    prev = phi;
  }
  state.phi = std::max(state.phi, state.horizon_phi[0]);

  while (state.active_segment + 1 < N &&
         state.phi >=
             path.knots[size_t(state.active_segment + 1)] - cfg.eps_phi &&
         sets[size_t(state.active_segment + 1)].contains(state.position,
                                                         1e-7))
    ++state.active_segment;
  return out;
}

ReplanOutcome replan(TrackerState& state, const ReferencePath& old_path,
                     const std::vector<ConvexPolytope>& old_sets,
                     PlanRequest req) {
  ReplanOutcome out;
  const Vec3 p_h1 = state.horizon.front();
  req.p0 = p_h1;
  req.R0 = old_path.orientation(state.phi);

  const ConvexPolytope& current = old_sets[size_t(state.active_segment)];
  if (!current.contains(p_h1, 1e-6)) {
    out.cold = true;
    out.plan_result = plan(req);
    out.path = out.plan_result.path;
  } else {
    // Farthest horizon point still inside the current set.
    Vec3 p_hmax = p_h1;
    for (const Vec3& p : state.horizon) {
      if (!current.contains(p, 1e-7)) break;
      p_hmax = p;
    }
    // The start set spans the remaining horizon plus the posed hull, so the
    // first optimized segment is immediately trackable.
    std::vector<Vec3> span = {p_h1, p_hmax};
    for (const Vec3& hp : req.ee.posed(p_h1, req.R0)) span.push_back(hp);
    ConvexPolytope s_replan;
    try {
      s_replan = set_convex_hull(ConvexBody(span), req.workspace,
                                 req.inflation.obstacle_margin);
    } catch (const Error& e) {
      throw Error(ErrorCode::PredictedCollision, e.what(), e.index());
    }
    req.start_set = s_replan;
    out.plan_result = plan(req);
    out.path = out.plan_result.path;

    // Extend the path backward at the start so the projection of points
    // slightly behind p0 stays well defined.
    ReferencePath& path = out.path;
    if (path.segments() >= 1) {
      Vec3 dir0 = path.via_points[1] - path.via_points[0];
      if (dir0.norm() > 1e-12) {
        dir0.normalize();
        double ext = std::max(0.02, (p_hmax - p_h1).norm());
        // Clip the extension so it stays inside the start set.
        VecX d = s_replan.halfspace_distances(p_h1);
        for (int s = 0; s < s_replan.rows(); ++s) {
          double denom = -s_replan.A().row(s).dot(dir0);
          if (denom > 1e-12) ext = std::min(ext, -d[s] / denom);
        }
        if (ext > 1e-9) {
          path.via_points.insert(path.via_points.begin(),
                                 Vec3(path.via_points[0] - ext * dir0));
          path.alphas.insert(path.alphas.begin(), 0.0);
          path.set_sequence.insert(path.set_sequence.begin(),
                                   path.set_sequence.front());
          // Blends are dropped: the knots are re-derived from the extended
          // polyline and the prepended segment keeps the start straight.
          path.smoothing.clear();
          path.recompute_knots();
        }
      }
    }
  }

  state.phi = local_project(out.path, state.position, 0.0, out.path.length());
  state.active_segment = out.path.segment_index(state.phi);
  std::fill(state.horizon_phi.begin(), state.horizon_phi.end(), state.phi);
  double window = 3.0 * 1.0;  // generous first re-projection window
  double prev = state.phi;
  for (size_t m = 0; m < state.horizon.size(); ++m) {
    double phi = local_project(out.path, state.horizon[m], prev,
                               prev + window);
    state.horizon_phi[m] = phi;
    prev = phi;
  }
  return out;
}

}  // namespace boundplan
