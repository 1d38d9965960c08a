#include "boundplan/graph/set_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "boundplan/errors.hpp"
#include "boundplan/solvers/qp.hpp"

namespace boundplan {

double size_cost(const Ellipsoid& e, const CostParams& params) {
  return 1.0 + params.w_size * std::tanh(0.5 - std::cbrt(e.det()));
}

double edge_cost(const Vec3& p_ab, const Vec3& p_bc, const Ellipsoid& shared,
                 const CostParams& params) {
  return size_cost(shared, params) * (p_ab - p_bc).norm() + params.c_bias;
}

Vec3 project_to_vertex(const Vec3& target, const ConvexPolytope& poly) {
  if (is_empty(poly))
    throw Error(ErrorCode::EmptySet, "project_to_vertex: empty polytope");
  if (poly.contains(target, 0.0)) return target;
  MatX H = 2.0 * MatX::Identity(3, 3);
  VecX g = -2.0 * target;
  auto res = solve_qp(H, g, poly.A(), poly.b());
  if (res.status != QpStatus::Optimal)
    throw Error(ErrorCode::EmptySet, "project_to_vertex: projection failed");
  return Vec3(res.x);
}

SetGraph::SetGraph(const Vec3& start, const Vec3& goal, CostParams params)
    : start_(start), goal_(goal), params_(params) {}

int SetGraph::find_root(int id) const {
  while (parent_[size_t(id)] != id) {
    parent_[size_t(id)] = parent_[size_t(parent_[size_t(id)])];
    id = parent_[size_t(id)];
  }
  return id;
}

void SetGraph::unite(int a, int b) {
  parent_[size_t(find_root(a))] = find_root(b);
}

bool SetGraph::connected() const {
  return start_set_ >= 0 && final_set_ >= 0 &&
         find_root(start_set_) == find_root(final_set_);
}

bool SetGraph::add_set_to_graph(const ConvexPolytope& s, const Ellipsoid& e,
                                const FitPredicate& fit) {
  const int id = static_cast<int>(sets_.size());
  sets_.push_back(s);
  ellipsoids_.push_back(e);
  anchors_.emplace_back();
  parent_.push_back(id);

  if (start_set_ < 0 && s.contains(start_, 1e-9)) {
    start_set_ = id;
    anchors_[size_t(id)] = start_;
  }
  if (final_set_ < 0 && s.contains(goal_, 1e-9)) {
    final_set_ = id;
    if (!anchors_[size_t(id)]) anchors_[size_t(id)] = goal_;
  }

  const int first_vertex = static_cast<int>(vertices_.size());
  for (int other = 0; other < id; ++other) {
    ConvexPolytope inter = sets_[size_t(other)].intersect(s);
    if (is_empty(inter) || !fit(inter)) continue;

    IntersectionVertex v;
    v.set_a = other;
    v.set_b = id;
    v.poly = inter;
    // Anchor of an established neighbor wins; otherwise fall back to a
    // deterministic interior point of the intersection.
    if (anchors_[size_t(other)])
      v.point = project_to_vertex(*anchors_[size_t(other)], inter);
    else if (anchors_[size_t(id)])
      v.point = project_to_vertex(*anchors_[size_t(id)], inter);
    else
      v.point = chebyshev_center(inter).center;
    vertices_.push_back(v);
    unite(other, id);
    if (!anchors_[size_t(other)]) anchors_[size_t(other)] = v.point;
    if (!anchors_[size_t(id)]) anchors_[size_t(id)] = v.point;
  }

  // New edges: every (new vertex, any vertex) pair sharing a parent set.
  for (int i = first_vertex; i < static_cast<int>(vertices_.size()); ++i) {
    for (int j = 0; j < i; ++j) {
      const auto& a = vertices_[size_t(i)];
      const auto& b = vertices_[size_t(j)];
      int shared = -1;
      if (a.set_a == b.set_a || a.set_a == b.set_b) shared = a.set_a;
      else if (a.set_b == b.set_a || a.set_b == b.set_b) shared = a.set_b;
      if (shared < 0) continue;
      edges_.push_back({j, i, shared,
                        edge_cost(a.point, b.point,
                                  ellipsoids_[size_t(shared)], params_)});
    }
  }
  return connected();
}

std::vector<int> SetGraph::shortest_set_path() const {
  if (start_set_ < 0 || final_set_ < 0 || !connected())
    throw Error(ErrorCode::NoPath, "shortest_set_path: not connected");
  if (start_set_ == final_set_) return {start_set_};

  const int n = static_cast<int>(vertices_.size());
  std::vector<std::vector<std::pair<int, double>>> adj(
      static_cast<size_t>(n));
  for (const auto& ed : edges_) {
    adj[size_t(ed.u)].push_back({ed.v, ed.cost});
    adj[size_t(ed.v)].push_back({ed.u, ed.cost});
  }

  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dist(size_t(n), inf);
  std::vector<int> prev(size_t(n), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> pq;

  const Ellipsoid& e0 = ellipsoids_[size_t(start_set_)];
  for (int i = 0; i < n; ++i) {
    const auto& v = vertices_[size_t(i)];
    if (v.set_a != start_set_ && v.set_b != start_set_) continue;
    double d = size_cost(e0, params_) * (start_ - v.point).norm() +
               params_.c_bias;
    if (d < dist[size_t(i)]) {
      dist[size_t(i)] = d;
      pq.push({d, i});
    }
  }

  std::vector<char> done(size_t(n), 0);
  while (!pq.empty()) {
    auto [d, u] = pq.top();
    pq.pop();
    if (done[size_t(u)] || d > dist[size_t(u)]) continue;
    done[size_t(u)] = 1;
    for (auto [v, w] : adj[size_t(u)]) {
      double nd = d + w;
      if (nd < dist[size_t(v)] - 1e-15 ||
          (std::abs(nd - dist[size_t(v)]) <= 1e-15 && u < prev[size_t(v)])) {
        dist[size_t(v)] = nd;
        prev[size_t(v)] = u;
        pq.push({nd, v});
      }
    }
  }

  // Exit cost from final-set vertices to the goal point.
  const Ellipsoid& ef = ellipsoids_[size_t(final_set_)];
  double best = inf;
  int best_v = -1;
  for (int i = 0; i < n; ++i) {
    const auto& v = vertices_[size_t(i)];
    if (v.set_a != final_set_ && v.set_b != final_set_) continue;
    if (dist[size_t(i)] == inf) continue;
    double total = dist[size_t(i)] +
                   size_cost(ef, params_) * (goal_ - v.point).norm() +
                   params_.c_bias;
    if (total < best - 1e-15 || (std::abs(total - best) <= 1e-15 &&
                                 i < best_v)) {
      best = total;
      best_v = i;
    }
  }
  if (best_v < 0)
    throw Error(ErrorCode::NoPath, "shortest_set_path: no route to goal");

  std::vector<int> vpath;
  for (int v = best_v; v >= 0; v = prev[size_t(v)]) vpath.push_back(v);
  std::reverse(vpath.begin(), vpath.end());

  std::vector<int> path = {start_set_};
  int current = start_set_;
  for (int vi : vpath) {
    const auto& v = vertices_[size_t(vi)];
    int next = (v.set_a == current) ? v.set_b : v.set_a;
    path.push_back(next);
    current = next;
  }
  if (path.back() != final_set_)
    throw Error(ErrorCode::NoPath, "shortest_set_path: malformed route");
  return path;
}

nlohmann::json SetGraph::to_json() const {
  nlohmann::json j;
  j["start_set"] = start_set_;
  j["final_set"] = final_set_;
  j["sets"] = nlohmann::json::array();
  for (size_t i = 0; i < sets_.size(); ++i) {
    nlohmann::json s;
    s["id"] = i;
    const auto& poly = sets_[i];
    for (int r = 0; r < poly.rows(); ++r) {
      s["A"].push_back({poly.A()(r, 0), poly.A()(r, 1), poly.A()(r, 2)});
      s["b"].push_back(poly.b()[r]);
    }
    s["ellipsoid_logdet"] = ellipsoids_[i].logdet();
    j["sets"].push_back(s);
  }
  j["vertices"] = nlohmann::json::array();
  for (const auto& v : vertices_) {
    j["vertices"].push_back({{"sets", {v.set_a, v.set_b}},
                             {"point", {v.point.x(), v.point.y(),
                                        v.point.z()}}});
  }
  j["edges"] = nlohmann::json::array();
  for (const auto& e : edges_) {
    j["edges"].push_back({{"u", e.u},
                          {"v", e.v},
                          {"shared_set", e.shared_set},
                          {"cost", e.cost}});
  }
  return j;
}

}  // namespace boundplan
