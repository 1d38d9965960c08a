#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "boundplan/geometry/ellipsoid.hpp"
#include "boundplan/geometry/polytope.hpp"
#include "json.hpp"

namespace boundplan {

struct CostParams {
  double c_bias = 0.1;  // per-hop bias, keeps paths short
  double w_size = 0.5;  // weight of the set-size discount
};

// 1 + w_size * tanh(1/2 - det(C)^(1/3)); small sets cost more.
double size_cost(const Ellipsoid& e, const CostParams& params);

double edge_cost(const Vec3& p_ab, const Vec3& p_bc, const Ellipsoid& shared,
                 const CostParams& params);

// Euclidean projection onto the polytope; returns target when inside.
Vec3 project_to_vertex(const Vec3& target, const ConvexPolytope& poly);

struct IntersectionVertex {
  int set_a = -1;
  int set_b = -1;
  ConvexPolytope poly;
  Vec3 point = Vec3::Zero();
};

struct GraphEdge {
  int u = -1;  // vertex indices
  int v = -1;
  int shared_set = -1;
  double cost = 0.0;
};

// Graph over pairwise intersections of free-space sets. Vertices are the
// non-empty intersections, edges connect vertices that share a parent set.
class SetGraph {
 public:
  using FitPredicate = std::function<bool(const ConvexPolytope&)>;

  SetGraph() : SetGraph(Vec3::Zero(), Vec3::Zero()) {}
  SetGraph(const Vec3& start, const Vec3& goal, CostParams params = {});

  // Adds a set, creates intersection vertices passing `fit`, wires edges.
  // Returns true once the start and final sets are connected.
  bool add_set_to_graph(const ConvexPolytope& s, const Ellipsoid& e,
                        const FitPredicate& fit);

  bool connected() const;

  // Ordered set ids from the start set to the final set (Dijkstra,
  // ties broken by smallest vertex id). Throws NoPath when disconnected.
  std::vector<int> shortest_set_path() const;

  int set_count() const { return static_cast<int>(sets_.size()); }
  const ConvexPolytope& set(int id) const { return sets_[size_t(id)]; }
  const Ellipsoid& ellipsoid(int id) const { return ellipsoids_[size_t(id)]; }
  int start_set_id() const { return start_set_; }
  int final_set_id() const { return final_set_; }
  const std::vector<IntersectionVertex>& vertices() const { return vertices_; }
  const std::vector<GraphEdge>& edges() const { return edges_; }
  const Vec3& start_point() const { return start_; }
  const Vec3& goal_point() const { return goal_; }

  nlohmann::json to_json() const;

 private:
  int find_root(int id) const;
  void unite(int a, int b);

  Vec3 start_, goal_;
  CostParams params_;
  std::vector<ConvexPolytope> sets_;
  std::vector<Ellipsoid> ellipsoids_;
  std::vector<std::optional<Vec3>> anchors_;  // per-set projection seed
  std::vector<IntersectionVertex> vertices_;
  std::vector<GraphEdge> edges_;
  mutable std::vector<int> parent_;  // union-find over set ids
  int start_set_ = -1;
  int final_set_ = -1;
};

}  // namespace boundplan
