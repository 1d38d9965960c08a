#pragma once

#include <vector>

#include "boundplan/inflation/inflate.hpp"
#include "boundplan/planner/planner.hpp"
#include "boundplan/planner/reference_path.hpp"

namespace boundplan {

// Tracked point on the rigid body: fixed offset in the end-effector frame,
// margin accounting for the body radius around it.
struct TrackedPoint {
  Vec3 offset = Vec3::Zero();
  double margin = 0.0;
};

struct TrackerConfig {
  int horizon_steps = 20;  // M
  double dt = 0.05;        // seconds
  double v_max = 0.5;      // m/s per axis
  double a_max = 2.0;      // m/s^2 per axis
  double eps_phi = 0.02;   // meters, split tolerance
  double progress_weight = 1.0;
  double deviation_weight = 10.0;
  EndEffectorModel ee;  // hull points bounded by the tunnel sets
  std::vector<TrackedPoint> collision_points;
};

struct TrackerState {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double phi = 0.0;
  double time = 0.0;
  int active_segment = 0;
  std::vector<Vec3> horizon;        // predicted positions, size M
  std::vector<double> horizon_phi;  // path parameters of the horizon
  std::vector<ConvexPolytope> collision_sets;
  bool degraded = false;  // last step fell back to braking
};

struct StepResult {
  Vec3 acceleration = Vec3::Zero();
  bool degraded = false;
  int split_index = 0;  // M+1 sentinel: no transition this cycle
};

// Horizon initialized at rest on the current position.
TrackerState make_tracker_state(const Vec3& position, const Vec3& velocity,
                                const ReferencePath& path,
                                const TrackerConfig& cfg);

// Path sets per segment, resolved through the planner's graph.
std::vector<ConvexPolytope> path_sets(const ReferencePath& path,
                                      const SetGraph& graph);

// Smallest horizon step past the segment boundary (with tolerance) that is
// already a member of both sets; M+1 when the horizon never transitions.
int split_index(const TrackerState& state, const ReferencePath& path,
                const std::vector<ConvexPolytope>& sets, int segment,
                double eps_phi);

// Collision-free set around the motion segment of one tracked point,
// retracted by its margin. Throws PredictedCollision when the segment
// already intersects an inflated obstacle.
ConvexPolytope collision_set_for_point(const Vec3& p_now, const Vec3& p_hend,
                                       const Workspace& ws, double margin);

// Rebuilds every tracked point's set from its current position and its
// predicted position at the previous horizon's end.
void update_collision_sets(TrackerState& state, const Workspace& ws,
                           const ReferencePath& path,
                           const TrackerConfig& cfg);

// One receding-horizon control step: solves the tunnel-following program
// over M steps of double-integrator dynamics, applies the first
// acceleration and advances the state by dt.
StepResult step(TrackerState& state, const ReferencePath& path,
                const std::vector<ConvexPolytope>& sets, const Workspace& ws,
                const TrackerConfig& cfg);

struct ReplanOutcome {
  ReferencePath path;
  PlanResult plan_result;
  bool cold = false;  // fell back to a from-scratch plan
};

// Replans toward the goal in `req` from the current horizon: the start set
// spans the horizon points still inside the current set, and the new path
// is extended backward at the start for a clean projection. The state's
// path parameter and active segment are remapped onto the new path.
ReplanOutcome replan(TrackerState& state, const ReferencePath& old_path,
                     const std::vector<ConvexPolytope>& old_sets,
                     PlanRequest req);

}  // namespace boundplan
