#pragma once

#include <optional>
#include <string>
#include <vector>

#include "boundplan/planner/planner.hpp"
#include "boundplan/tracker/tracker.hpp"
#include "json.hpp"

namespace boundplan {

// Pose as stored in scenario files: position plus a (w, x, y, z) quaternion.
// The quaternion is kept verbatim for lossless re-serialization and
// normalized only when converted to a Rotation.
struct Pose {
  Vec3 position = Vec3::Zero();
  Eigen::Vector4d quaternion = Eigen::Vector4d(1, 0, 0, 0);

  Rotation rotation() const;
};

struct NamedObstacle {
  std::string name;
  std::vector<Vec3> vertices;
};

struct PlannerParams {
  double c_bias = 0.1;
  double w_size = 0.5;
  double w_alpha = 0.1;
  double obstacle_margin = 0.0;
  int sample_budget = 200;
  std::uint64_t rng_seed = 0;
  bool position_only = false;
  bool smooth = true;
};

// Goal change applied mid-run, triggered by simulated time or by progress.
struct ReplanEvent {
  std::optional<double> trigger_time;
  std::optional<double> trigger_phi;
  Pose goal;
};

struct Scenario {
  int schema_version = 1;
  Vec3 domain_min = Vec3::Zero();
  Vec3 domain_max = Vec3::Ones();
  std::vector<NamedObstacle> obstacles;
  Pose start;
  Pose goal;
  std::vector<Vec3> ee_hull_offsets = {Vec3::Zero()};
  std::vector<TrackedPoint> collision_points;
  PlannerParams planner;
  TrackerConfig tracker;  // ee/collision_points filled by make_tracker_config
  std::vector<ReplanEvent> replan_events;
};

// Throws Error(InvalidInput) naming the offending field. Validates the
// schema version, quaternion norms (1e-6) and obstacle-name uniqueness.
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

Scenario load_scenario(const std::string& file_path);
void save_scenario(const Scenario& s, const std::string& file_path);

// Canonical serialization: parse then dump with sorted keys and 2-space
// indent. A fixed point under repeated application.
std::string canonical_json(const std::string& text);

Workspace make_workspace(const Scenario& s);
PlanRequest make_plan_request(const Scenario& s);
TrackerConfig make_tracker_config(const Scenario& s);

}  // namespace boundplan
