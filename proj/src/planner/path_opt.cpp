#include "boundplan/planner/path_opt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "boundplan/errors.hpp"
#include "boundplan/graph/set_graph.hpp"
#include "boundplan/solvers/qp.hpp"

namespace boundplan {

bool ee_fits(const ConvexPolytope& poly, const EndEffectorModel& ee,
             const std::vector<Rotation>& probes) {
  if (poly.rows() == 0) return true;
  for (const Rotation& R : probes) {
    VecX shrunk = poly.b();
    for (int s = 0; s < poly.rows(); ++s) {
      Vec3 a = poly.A().row(s).transpose();
      double worst = -std::numeric_limits<double>::infinity();
      for (const Vec3& l : ee.hull_offsets)
        worst = std::max(worst, a.dot(R * l));
      shrunk[s] -= worst;
    }
    if (!is_empty(ConvexPolytope(poly.A(), shrunk))) return true;
  }
  return false;
}

double phi_min(int segment, int hull_index, const Vec3& a, double b,
               const EndEffectorModel& ee, const ReferencePath& path) {
  const double lo = path.knots[size_t(segment)];
  const double hi = path.knots[size_t(segment + 1)];
  const Vec3 offset = ee.hull_offsets[size_t(hull_index)];
  auto dist = [&](double phi) {
    return a.dot(path.position(phi) + path.orientation(phi) * offset) - b;
  };
  if (hi - lo < 1e-12) return lo;

  const int grid = 32;
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
  while (x2 - x1 > 1e-8) {
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

namespace {

struct Anchor {
  int segment;
  int hull;
  int row;
  double tau;
};

std::vector<double> proportional_alphas(const std::vector<Vec3>& vias,
                                        double theta) {
  const int n = static_cast<int>(vias.size()) - 1;
  std::vector<double> lengths(static_cast<size_t>(n), 0.0);
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    lengths[size_t(i)] = (vias[size_t(i + 1)] - vias[size_t(i)]).norm();
    total += lengths[size_t(i)];
  }
  std::vector<double> alphas(static_cast<size_t>(n), 0.0);
  for (int i = 0; i < n; ++i)
    alphas[size_t(i)] =
        total > 1e-12 ? theta * lengths[size_t(i)] / total : theta / n;
  return alphas;
}

double objective_value(const std::vector<Vec3>& vias,
                       const std::vector<double>& alphas,
                       const std::vector<double>& costs, double w_alpha) {
  double obj = 0.0;
  const int n = static_cast<int>(vias.size()) - 1;
  for (int i = 0; i < n; ++i)
    obj += costs[size_t(i)] *
           (vias[size_t(i + 1)] - vias[size_t(i)]).squaredNorm();
  for (int i = 0; i + 1 < n; ++i) {
    double da = alphas[size_t(i + 1)] - alphas[size_t(i)];
    obj += costs[size_t(i)] * w_alpha * da * da;
  }
  return obj;
}

}  // namespace

PathOptResult optimize_path(const std::vector<ConvexPolytope>& sets,
                            const std::vector<double>& size_costs,
                            const std::vector<int>& set_ids, const Vec3& p0,
                            const Rotation& R0, const Vec3& pf,
                            const Rotation& Rf, const EndEffectorModel& ee,
                            const PathOptConfig& cfg) {
  const int N = static_cast<int>(sets.size());
  if (N < 1 || size_costs.size() != sets.size())
    throw Error(ErrorCode::InvalidInput, "optimize_path: bad set sequence");

  Geodesic geo = geodesic(R0, Rf);
  const double theta = geo.angle;
  const Vec3 omega = geo.axis;
  const int L = static_cast<int>(ee.hull_offsets.size());

  // Intersection sets between consecutive path sets hold the free vias.
  std::vector<ConvexPolytope> inters;
  for (int j = 1; j < N; ++j)
    inters.push_back(sets[size_t(j - 1)].intersect(sets[size_t(j)]));

  std::vector<Vec3> vias(size_t(N + 1));
  vias.front() = p0;
  vias.back() = pf;
  for (int j = 1; j < N; ++j) {
    Vec3 guess = p0 + (pf - p0) * double(j) / N;
    try {
      vias[size_t(j)] = project_to_vertex(guess, inters[size_t(j - 1)]);
    } catch (const Error&) {
      throw Error(ErrorCode::PathInfeasible,
                  "optimize_path: empty intersection set", j);
    }
  }

  auto build_path = [&](const std::vector<Vec3>& points,
                        const std::vector<double>& alphas) {
    ReferencePath path;
    path.via_points = points;
    path.recompute_knots();
    path.omega_ref = omega;
    path.alphas = alphas;
    path.R0 = R0;
    path.set_sequence = set_ids;
    return path;
  };

  PathOptResult out;
  std::vector<double> alphas = proportional_alphas(vias, theta);

  if (N == 1) {
    out.path = build_path(vias, alphas);
    out.objective = objective_value(vias, alphas, size_costs, cfg.w_alpha);
    return out;
  }

  const int nv = 3 * (N - 1);
  MatX H = MatX::Zero(nv, nv);
  VecX g = VecX::Zero(nv);
  for (int i = 0; i < N; ++i) {
    double c = size_costs[size_t(i)];
    int bi = i - 1, bj = i;  // via indices i and i+1, variable blocks
    if (bi >= 0) H.block<3, 3>(3 * bi, 3 * bi) += 2.0 * c * Mat3::Identity();
    if (bj <= N - 2)
      H.block<3, 3>(3 * bj, 3 * bj) += 2.0 * c * Mat3::Identity();
    if (bi >= 0 && bj <= N - 2) {
      H.block<3, 3>(3 * bi, 3 * bj) -= 2.0 * c * Mat3::Identity();
      H.block<3, 3>(3 * bj, 3 * bi) -= 2.0 * c * Mat3::Identity();
    }
    if (bi < 0) g.segment<3>(3 * bj) += -2.0 * c * p0;
    if (bj > N - 2) g.segment<3>(3 * bi) += -2.0 * c * pf;
  }

  // Solves the via QP for fixed alphas and the given extra anchors; the
  // phi_min anchors of the current iterate are recomputed inside.
  std::vector<Anchor> extra;
  auto solve_vias = [&](const std::vector<Vec3>& cur,
                        const std::vector<double>& al)
      -> std::pair<QpStatus, std::vector<Vec3>> {
    ReferencePath path = build_path(cur, al);
    std::vector<Anchor> anchors = extra;
    for (int i = 0; i < N; ++i) {
      const auto& poly = sets[size_t(i)];
      double span = path.knots[size_t(i + 1)] - path.knots[size_t(i)];
      for (int l = 0; l < L; ++l) {
        for (int s = 0; s < poly.rows(); ++s) {
          anchors.push_back({i, l, s, 0.0});
          anchors.push_back({i, l, s, 1.0});
          if (span < 1e-12) continue;
          Vec3 a = poly.A().row(s).transpose();
          double phi = phi_min(i, l, a, poly.b()[s], ee, path);
          double tau = (phi - path.knots[size_t(i)]) / span;
          if (tau > 1e-9 && tau < 1.0 - 1e-9)
            anchors.push_back({i, l, s, tau});
        }
      }
    }

    std::vector<Eigen::RowVectorXd> grows;
    std::vector<double> hvals;
    auto add_row = [&](int via_a, double wa, int via_b, double wb,
                       const Vec3& a, double rhs) {
      Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(nv);
      bool any = false;
      auto put = [&](int via, double w) {
        if (via <= 0) {
          rhs -= w * a.dot(p0);
        } else if (via >= N) {
          rhs -= w * a.dot(pf);
        } else {
          row.segment<3>(3 * (via - 1)) += w * a.transpose();
          any = true;
        }
      };
      put(via_a, wa);
      put(via_b, wb);
      if (any) {
        grows.push_back(row);
        hvals.push_back(rhs);
      }
    };

    // Via membership in its intersection set.
    for (int j = 1; j < N; ++j) {
      const auto& poly = inters[size_t(j - 1)];
      for (int s = 0; s < poly.rows(); ++s)
        add_row(j, 1.0, j, 0.0, poly.A().row(s).transpose(), poly.b()[s]);
    }
    // Hull containment at the anchored phi values.
    for (const auto& an : anchors) {
      const auto& poly = sets[size_t(an.segment)];
      Vec3 a = poly.A().row(an.row).transpose();
      Rotation R = rotation_exp(omega, al[size_t(an.segment)] * an.tau) *
                   path.knot_rotation(an.segment);
      double rhs = poly.b()[an.row] -
                   a.dot(R * ee.hull_offsets[size_t(an.hull)]);
      add_row(an.segment, 1.0 - an.tau, an.segment + 1, an.tau, a, rhs);
    }

    MatX G(static_cast<int>(grows.size()), nv);
    VecX h(static_cast<int>(grows.size()));
    for (size_t r = 0; r < grows.size(); ++r) {
      G.row(static_cast<int>(r)) = grows[r];
      h[static_cast<int>(r)] = hvals[r];
    }
    auto res = solve_qp(H, g, G, h, 120);
    std::vector<Vec3> next = cur;
    if (res.status == QpStatus::Optimal)
      for (int j = 1; j < N; ++j)
        next[size_t(j)] = Vec3(res.x.segment<3>(3 * (j - 1)));
    return {res.status, next};
  };

  auto fail_infeasible = [&]() {
    std::vector<Rotation> probes = {Rotation::identity(), R0, Rf};
    for (int j = 1; j < N; ++j)
      if (!ee_fits(inters[size_t(j - 1)], ee, probes))
        throw Error(ErrorCode::PathInfeasible,
                    "optimize_path: hull does not fit through intersection",
                    j);
    throw Error(ErrorCode::PathInfeasible,
                "optimize_path: constraint system infeasible", -1);
  };

  double prev_obj = std::numeric_limits<double>::infinity();
  bool converged = false;
  for (int outer = 0; outer < cfg.max_outer; ++outer) {
    out.outer_iterations = outer + 1;
    auto [status, next] = solve_vias(vias, alphas);
    if (status != QpStatus::Optimal) fail_infeasible();
    double disp = 0.0;
    for (int j = 1; j < N; ++j)
      disp = std::max(disp, (next[size_t(j)] - vias[size_t(j)]).norm());
    vias = next;
    alphas = proportional_alphas(vias, theta);
    double obj = objective_value(vias, alphas, size_costs, cfg.w_alpha);
    if (obj > prev_obj + 1e-9) out.descent_violation = true;
    prev_obj = obj;
    if (disp < cfg.via_tol) {
      converged = true;
      break;
    }
  }
  if (!converged) out.max_iter_reached = true;

  // Dense sweep: any residual violation becomes a persistent anchor.
  for (int round = 0; round < 6; ++round) {
    ReferencePath path = build_path(vias, alphas);
    double worst = 0.0;
    Anchor worst_anchor{0, 0, 0, 0.0};
    for (int i = 0; i < N; ++i) {
      const auto& poly = sets[size_t(i)];
      double span = path.knots[size_t(i + 1)] - path.knots[size_t(i)];
      if (span < 1e-12) continue;
      for (int k = 0; k <= 200; ++k) {
        double tau = k / 200.0;
        double phi = path.knots[size_t(i)] + tau * span;
        Vec3 p = path.position(phi);
        Rotation R = path.orientation(phi);
        for (int l = 0; l < L; ++l) {
          VecX d = poly.halfspace_distances(
              p + R * ee.hull_offsets[size_t(l)]);
          int s;
          double v = d.maxCoeff(&s);
          if (v > worst) {
            worst = v;
            worst_anchor = {i, l, s, tau};
          }
        }
      }
    }
    if (worst <= 1e-9) break;
    extra.push_back(worst_anchor);
    auto [status, next] = solve_vias(vias, alphas);
    if (status != QpStatus::Optimal) fail_infeasible();
    vias = next;
    alphas = proportional_alphas(vias, theta);
  }

  out.path = build_path(vias, alphas);
  out.objective = objective_value(vias, alphas, size_costs, cfg.w_alpha);
  return out;
}

}  // namespace boundplan
