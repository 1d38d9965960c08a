#include "boundplan/planner/planner.hpp"

#include <algorithm>
#include <cmath>

#include "boundplan/inflation/mvie.hpp"
#include "boundplan/solvers/lp.hpp"

namespace boundplan {
namespace {

void domain_bounds(const ConvexPolytope& domain, Vec3& lo, Vec3& hi) {
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {1, -1}) {
      VecX c = VecX::Zero(3);
      c[axis] = sign;
      auto res = solve_lp(c, domain.A(), domain.b());
      if (res.status != LpStatus::Optimal)
        throw Error(ErrorCode::Unbounded, "sample_free: unbounded domain");
      double v = res.x[axis];
      (sign > 0 ? hi : lo)[axis] = v;
    }
  }
}

bool in_obstacle(const Vec3& x, const ConvexBody& obstacle) {
  ConvexBody point({x});
  return closest_points(point, obstacle).distance <= 1e-12;
}

}  // namespace

Vec3 sample_free(const Workspace& ws,
                 const std::vector<ConvexPolytope>& existing_sets,
                 std::mt19937_64& rng, int max_attempts) {
  Vec3 lo, hi;
  domain_bounds(ws.domain, lo, hi);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    Vec3 x = lo + Vec3(uni(rng) * (hi - lo).x(), uni(rng) * (hi - lo).y(),
                       uni(rng) * (hi - lo).z());
    if (!ws.domain.contains(x, 1e-9)) continue;
    bool rejected = false;
    for (const auto& obs : ws.obstacles)
      if (in_obstacle(x, obs)) {
        rejected = true;
        break;
      }
    for (size_t i = 0; !rejected && i < existing_sets.size(); ++i)
      if (existing_sets[i].contains(x, 0.0)) rejected = true;
    if (!rejected) return x;
  }
  throw Error(ErrorCode::ExplorationSaturated,
              "sample_free: no free unexplored sample found");
}

PlanResult plan(const PlanRequest& req) {
  const Workspace& ws = req.workspace;
  const double margin = req.inflation.obstacle_margin;

  ConvexPolytope s_start, s_final;
  if (req.start_set) {
    s_start = *req.start_set;
  } else {
    try {
      s_start = set_convex_hull(ConvexBody(req.ee.posed(req.p0, req.R0)), ws,
                                margin);
    } catch (const Error& e) {
      throw Error(ErrorCode::StartInCollision, e.what(), e.index());
    }
  }
  try {
    s_final = set_convex_hull(ConvexBody(req.ee.posed(req.pf, req.Rf)), ws,
                              margin);
  } catch (const Error& e) {
    throw Error(ErrorCode::GoalInCollision, e.what(), e.index());
  }

  const std::vector<Rotation> probes = {Rotation::identity(), req.R0, req.Rf};
  SetGraph::FitPredicate fit = [&](const ConvexPolytope& poly) {
    return ee_fits(poly, req.ee, probes);
  };

  PlanResult out;
  out.rng_seed = req.rng_seed;
  SetGraph graph(req.p0, req.pf, req.cost_params);
  std::vector<ConvexPolytope> explored;

  auto admit = [&](const ConvexPolytope& set, const Ellipsoid& e) {
    explored.push_back(set);
    return graph.add_set_to_graph(set, e, fit);
  };

  bool connected = false;
  connected = admit(s_start, mvie(s_start));
  connected = admit(s_final, mvie(s_final));

  std::mt19937_64 rng(req.rng_seed);
  std::vector<int> path_old;
  std::vector<int> path_sets;
  bool success = false;
  while (!success) {
    std::vector<Vec3> seeds;
    bool refining = false;
    if (connected) {
      path_sets = graph.shortest_set_path();
      if (path_sets == path_old) {
        success = true;
        break;
      }
      refining = true;
      for (size_t i = 0; i + 1 < path_sets.size(); ++i) {
        int a = path_sets[i], b = path_sets[i + 1];
        for (const auto& v : graph.vertices()) {
          if ((v.set_a == a && v.set_b == b) ||
              (v.set_a == b && v.set_b == a)) {
            seeds.push_back(v.point);
            break;
          }
        }
      }
      path_old = path_sets;
    } else {
      seeds.push_back(sample_free(ws, explored, rng));
      ++out.samples_used;
    }

    for (const Vec3& seed : seeds) {
      if (out.inflations >= req.sample_budget)
        throw BudgetError(graph, "plan: inflation budget exhausted");
      ++out.inflations;
      try {
        auto res = inflate(seed, ws,
                           refining ? InflateMode::MvieFixedMid
                                    : InflateMode::Mvie,
                           req.inflation);
        connected = admit(res.set, res.ellipsoid);
      } catch (const Error&) {
        // Degenerate seed (boundary or residual collision); skip it.
      }
    }
  }

  std::vector<ConvexPolytope> seq_sets;
  std::vector<double> costs;
  for (int id : path_sets) {
    seq_sets.push_back(graph.set(id));
    costs.push_back(size_cost(graph.ellipsoid(id), req.cost_params));
  }

  PathOptConfig opt_cfg;
  opt_cfg.w_alpha = req.w_alpha;
  opt_cfg.position_only = req.position_only;
  auto opt = optimize_path(seq_sets, costs, path_sets, req.p0, req.R0,
                           req.pf, req.Rf, req.ee, opt_cfg);
  out.max_iter_reached = opt.max_iter_reached;
  out.path = opt.path;

  if (req.smooth) {
    // Blend points must keep the whole hull inside both adjacent sets at
    // every probe orientation, not just the reference point.
    auto inside = [&](int via_index, const Vec3& p) {
      for (int id : {path_sets[size_t(via_index - 1)],
                     path_sets[size_t(via_index)]}) {
        const ConvexPolytope& set = graph.set(id);
        for (const Rotation& R : probes)
          for (const Vec3& l : req.ee.hull_offsets)
            if (!set.contains(p + R * l, 1e-9)) return false;
      }
      return true;
    };
    out.path = smooth_corners(out.path, inside);
  }
  out.graph = std::move(graph);
  return out;
}

}  // namespace boundplan
