#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boundplan/io/scenario.hpp"
#include "boundplan/tracker/tracker.hpp"
#include "json.hpp"

namespace boundplan {

struct TrajectoryRecord {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  double phi = 0.0;
  int set_id = 0;
  bool degraded = false;
};

struct Metrics {
  double plan_time_s = 0.0;
  double path_length_m = 0.0;
  double orientation_length_deg = 0.0;
  double traj_duration_s = 0.0;
  std::vector<double> replan_times_s;
  int degraded_steps = 0;
  int collisions = 0;
  std::string failure;  // empty on success, error name otherwise
};

struct RunArtifact {
  Scenario scenario;
  ReferencePath path;
  std::vector<ConvexPolytope> sets;
  nlohmann::json graph;  // empty object unless dumped
  std::vector<TrajectoryRecord> trajectory;
  Metrics metrics;
};

nlohmann::json path_to_json(const ReferencePath& path);
ReferencePath path_from_json(const nlohmann::json& j);
nlohmann::json sets_to_json(const std::vector<ConvexPolytope>& sets);
std::vector<ConvexPolytope> sets_from_json(const nlohmann::json& j);
nlohmann::json metrics_to_json(const Metrics& m);

std::string trajectory_csv(const std::vector<TrajectoryRecord>& log);
std::vector<TrajectoryRecord> trajectory_from_csv(const std::string& text);

// Writes path.json, sets.json, graph.json, metrics.json, trajectory.csv and
// scenario.json under dir (created if missing).
void write_artifact(const RunArtifact& artifact, const std::string& dir);
RunArtifact read_artifact(const std::string& dir);

// Plot data: reference_polyline.txt, trajectory_polyline.txt (x y z rows),
// obstacle_faces.txt and set_faces.txt (one face per line: x1 y1 z1 x2 ...).
// Deterministic output derived from the artifact alone.
void emit_plot_data(const RunArtifact& artifact, const std::string& dir);

// All polytope vertices (triples of active planes, deduplicated).
std::vector<Vec3> polytope_vertices(const ConvexPolytope& poly);
// Faces as vertex loops ordered around each supporting half-space.
std::vector<std::vector<Vec3>> polytope_faces(const ConvexPolytope& poly);
std::vector<std::vector<Vec3>> hull_faces(const ConvexBody& body);

std::uint64_t fnv1a(const std::string& data);

struct RunOptions {
  bool dump_graph = false;
};

// Plans from the scenario and fills path/sets/graph/metrics.
// Planner errors are recorded in metrics.failure (artifact still returned).
RunArtifact run_plan(const Scenario& scenario, const RunOptions& opt = {});

// Closed-loop simulation with the scenario's replan events. When `planned`
// is null the path is planned inline first.
RunArtifact run_track(const Scenario& scenario, const RunArtifact* planned,
                      const RunOptions& opt = {});

}  // namespace boundplan
