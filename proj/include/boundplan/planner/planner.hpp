#pragma once

#include <cstdint>
#include <optional>
#include <random>

#include "boundplan/errors.hpp"
#include "boundplan/graph/set_graph.hpp"
#include "boundplan/inflation/inflate.hpp"
#include "boundplan/planner/path_opt.hpp"
#include "boundplan/planner/reference_path.hpp"

namespace boundplan {

struct PlanRequest {
  Vec3 p0 = Vec3::Zero();
  Rotation R0;
  Vec3 pf = Vec3::Zero();
  Rotation Rf;
  Workspace workspace;
  EndEffectorModel ee;
  CostParams cost_params;
  InflationConfig inflation;
  std::uint64_t rng_seed = 0;
  int sample_budget = 200;  // total inflation budget
  double w_alpha = 0.1;
  bool position_only = false;
  bool smooth = true;
  // Preset start set (replanning): used instead of the hull-based start set.
  std::optional<ConvexPolytope> start_set;
};

struct PlanResult {
  ReferencePath path;
  SetGraph graph;
  bool max_iter_reached = false;
  int samples_used = 0;
  int inflations = 0;
  std::uint64_t rng_seed = 0;
};

// Sample budget ran out before the set path converged; carries the graph
// explored so far.
class BudgetError : public Error {
 public:
  BudgetError(SetGraph graph, const std::string& what)
      : Error(ErrorCode::BudgetExceeded, what), graph_(std::move(graph)) {}
  const SetGraph& graph() const { return graph_; }

 private:
  SetGraph graph_;
};

// Uniform sample over the domain bounding box, rejected while inside an
// obstacle hull or a previously explored set. Throws ExplorationSaturated
// after max_attempts rejections.
Vec3 sample_free(const Workspace& ws,
                 const std::vector<ConvexPolytope>& existing_sets,
                 std::mt19937_64& rng, int max_attempts = 10000);

// Explore and refine a graph of collision-free convex sets between the two
// poses, then optimize the bounded reference path through the converged set
// sequence.
PlanResult plan(const PlanRequest& req);

}  // namespace boundplan
